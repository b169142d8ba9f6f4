"""Independent reference computations used by the tests.

Everything here is deliberately built from a different route than the
package internals: closed-form Gaussian algebra, symbolic differentiation,
scalar quadrature. Agreement between these and the library is the point
of the tests that import them.
"""

import numpy as np

SQRT3 = np.sqrt(3.0)

# frozen scalar references, evaluated once at 30 significant digits
GAUSSIAN_PEAK = 0.079577471545947667884        # 1/(4 pi)
GAUSSIAN_L2 = 0.19947114020071633897           # (8 pi)^(-1/2)
GAUSSIAN_L43 = 0.42804899481670900262          # closed-form L^{4/3} integral
KATO_SINGLE_G = 0.46679073880721196247         # 2^{1/8} * ||G||_{4/3}
KERNEL_CENTER = 0.076455561618776718899        # 1/(4 pi sqrt(13/12))
SPEED_G_AT_R2 = 0.050302555783788087539        # (1 - e^{-1})/(4 pi)
SYMBOL_1110 = 0.26359713811572677008           # e^{-4/3}
COORD_X_1110 = 0.86602540378443864676          # 1/sqrt(4/3)
COORD_Y_1110 = -0.41602514716892184151         # -(1/2)/sqrt((4/3)(13/12))


def couette_kernel_covariance(nu, t):
    """Covariance of the shear-diffusion kernel as a centered Gaussian."""
    return np.array([[2.0 * nu * (t + t ** 3 / 3.0), nu * t * t],
                     [nu * t * t, 2.0 * nu * t]])


def sheared_gaussian_covariance(nu, t, sigma2):
    """Covariance of the kernel applied to an isotropic Gaussian blob.

    The shear transports the blob covariance sigma2*I to
    sigma2*[[1+t^2, t], [t, 1]]; diffusion adds the kernel covariance.
    """
    blob = sigma2 * np.array([[1.0 + t * t, t], [t, 1.0]])
    return couette_kernel_covariance(nu, t) + blob


def gauss2d(cov, x, y):
    """Unit-mass centered Gaussian density with covariance matrix cov."""
    det = cov[0, 0] * cov[1, 1] - cov[0, 1] * cov[1, 0]
    inv = np.array([[cov[1, 1], -cov[0, 1]], [-cov[1, 0], cov[0, 0]]]) / det
    q = inv[0, 0] * x * x + 2.0 * inv[0, 1] * x * y + inv[1, 1] * y * y
    return np.exp(-0.5 * q) / (2.0 * np.pi * np.sqrt(det))


def forward_chars(tau, xi, eta):
    """Forward frequency characteristics of the limit drift flow.

    Inverse of the backward map; the limit-semigroup damping integrates
    the second component squared along this flow.
    """
    ep = np.exp(0.5 * tau)
    ep3 = np.exp(1.5 * tau)
    big_xi = (1.5 * xi - 0.5 * SQRT3 * eta) * ep + (-0.5 * xi + 0.5 * SQRT3 * eta) * ep3
    big_eta = (0.5 * SQRT3 * xi - 0.5 * eta) * ep + (-0.5 * SQRT3 * xi + 1.5 * eta) * ep3
    return big_xi, big_eta
