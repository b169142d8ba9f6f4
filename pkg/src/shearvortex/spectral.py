"""Transforms, derivatives, Biot-Savart inversion, norms and quadrature.

All operations assume smooth fields that decay well inside the box, so the
periodic spectral representation is accurate. Quadrature is the rectangle
rule, exact for resolved trigonometric content.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, UnsupportedOrderError
from .grid import Field

MAX_DERIVATIVE_ORDER = 4


@dataclass(frozen=True)
class WeightSpec:
    """Polynomial weight <x> = (1 + |x|^2)^(1/2) raised to the power m."""

    m: float

    def __post_init__(self):
        if not (0.0 <= self.m <= 12.0 and np.isfinite(self.m)):
            raise DomainError(f"weight exponent must lie in [0, 12], got {self.m!r}")


def to_spectral(f):
    """Ensure the spectral representation is populated; returns the field."""
    f.coeffs
    return f


def to_physical(f):
    """Ensure the physical representation is populated; returns the field."""
    f.values
    return f


def _axis_multiplier(grid, order):
    """(i k)^order along one axis; Nyquist zeroed for odd orders.

    The Nyquist mode of a real field has no well-defined odd derivative
    (its coefficient is real and self-conjugate), so it is projected out;
    this keeps derivatives of real fields exactly real.
    """
    k = grid.k.astype(np.complex128)
    if order % 2 == 1:
        k = k.copy()
        k[grid.n // 2] = 0.0
    return (1j * k) ** order


def derivative(f, a, b):
    """Mixed spectral derivative d^a/dx1^a d^b/dx2^b of the field."""
    a, b = int(a), int(b)
    if a < 0 or b < 0 or a + b > MAX_DERIVATIVE_ORDER:
        raise UnsupportedOrderError(
            f"derivative order ({a}, {b}) outside 0 <= a+b <= {MAX_DERIVATIVE_ORDER}")
    if a == 0 and b == 0:
        return f
    mult = 1.0
    if a:
        mult = _axis_multiplier(f.grid, a)[:, None]
    if b:
        mult = mult * _axis_multiplier(f.grid, b)[None, :]
    return Field(f.grid, coeffs=f.coeffs * mult)


def inverse_laplacian(f):
    """Solve lap(psi) = f with the mean-zero gauge (zero mode -> 0)."""
    kx, ky = f.grid.wavegrid()
    k2 = kx ** 2 + ky ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        psi = -f.coeffs / k2
    psi[0, 0] = 0.0
    return Field(f.grid, coeffs=psi)


def biot_savart(omega):
    """Velocity (u1, u2) = perp-gradient of the inverse Laplacian of omega.

    The gauge fixes the stream function to zero mean, so curl(u) recovers
    omega minus its mean value.
    """
    psi = inverse_laplacian(omega)
    u1 = Field(omega.grid, coeffs=-_axis_multiplier(omega.grid, 1)[None, :] * psi.coeffs)
    u2 = Field(omega.grid, coeffs=_axis_multiplier(omega.grid, 1)[:, None] * psi.coeffs)
    return u1, u2


def mass(f):
    """Integral of f over the box: zero spectral mode times the box area."""
    if f.has_coeffs and not f.has_values:
        return float(f.coeffs[0, 0].real) * (2.0 * f.grid.half_width) ** 2
    return float(np.sum(f.values)) * f.grid.spacing ** 2


def lp_norm(f, p):
    """L^p norm by rectangle-rule quadrature; p in [1, inf]."""
    p = float(p)
    if not p >= 1.0:
        raise DomainError(f"p must satisfy 1 <= p <= inf, got {p!r}")
    v = np.abs(f.values)
    if np.isinf(p):
        return float(v.max())
    h2 = f.grid.spacing ** 2
    if p == 1.0:
        return float(np.sum(v) * h2)
    if p == 2.0:
        return float(np.sqrt(np.sum(v * v) * h2))
    return float((np.sum(v ** p) * h2) ** (1.0 / p))


def weight_array(grid, m):
    """Samples of (1 + |x|^2)^(m/2) on the grid."""
    x1, x2 = grid.meshgrid()
    return (1.0 + x1 ** 2 + x2 ** 2) ** (0.5 * m)


def weighted_norm(f, weight, a=0, b=0):
    """Weighted Sobolev-type seminorm: L^2 norm of <x>^m d^a d^b f.

    Derivatives up to total order 3 are supported here; they are taken
    spectrally and the weight is applied in physical space.
    """
    m = weight.m if isinstance(weight, WeightSpec) else float(weight)
    WeightSpec(m)  # validate range
    if a + b > 3:
        raise UnsupportedOrderError(f"weighted norm supports a+b <= 3, got ({a}, {b})")
    g = derivative(f, a, b)
    w = weight_array(f.grid, m)
    h2 = f.grid.spacing ** 2
    return float(np.sqrt(np.sum((w * g.values) ** 2) * h2))


def weighted_inner(f, g, m=0.0):
    """Weighted L^2 inner product (f, g) with weight <x>^(2m)."""
    w2 = weight_array(f.grid, 2.0 * m) if m else 1.0
    h2 = f.grid.spacing ** 2
    return float(np.sum(w2 * f.values * g.values) * h2)


def dealias_mask(grid):
    """Boolean keep-mask implementing the 2/3 rule on both axes."""
    n = grid.n
    j = np.abs(np.fft.fftfreq(n, d=1.0 / n))
    keep = j <= n / 3.0
    return keep[:, None] & keep[None, :]


def dealias(f):
    """Project the field onto the 2/3 band."""
    return Field(f.grid, coeffs=f.coeffs * dealias_mask(f.grid))


def spectral_tail_ratio(f):
    """Max |coeff| in the outer eighth of the band over the overall max.

    A resolved field keeps this small; values above ~1e-6 signal that
    energy is piling up against the truncation.
    """
    c = np.abs(f.coeffs)
    peak = c.max()
    if peak == 0.0:
        return 0.0
    n = f.grid.n
    j = np.abs(np.fft.fftfreq(n, d=1.0 / n))
    outer = (j[:, None] >= (7.0 / 16.0) * n) | (j[None, :] >= (7.0 / 16.0) * n)
    return float(c[outer].max() / peak)


def tail_mass_ratio(f):
    """Fraction of the L^1 mass outside the half-box |x|, |y| <= L/2."""
    L = f.grid.half_width
    x1, x2 = f.grid.meshgrid()
    v = np.abs(f.values)
    total = v.sum()
    if total == 0.0:
        return 0.0
    outside = (np.abs(x1) > 0.5 * L) | (np.abs(x2) > 0.5 * L)
    return float(v[outside].sum() / total)


def shear_spectrum(coeffs, grid, slope):
    """Evaluate the band-limited spectrum at (xi_j, slope*xi_j + eta_k).

    A shear in the frequency plane is exactly a modulation in physical
    space, so the evaluation is trigonometrically exact: the mixed
    (axis-0 spectral, axis-1 physical) representation picks up the phase
    exp(-i slope xi_j y_q) before transforming back. Returns the evaluated
    array together with the boolean mask of lattice points whose request
    lies outside the resolvable band (those values are periodic wraps and
    should be discarded or vetted by the caller).
    """
    n = grid.n
    y = grid.x
    k = grid.k
    mixed = np.fft.ifft(coeffs, axis=1) * n
    mixed *= np.exp(-1j * slope * np.outer(k, y))
    out = np.fft.fft(mixed, axis=1) / n
    target = slope * k[:, None] + k[None, :]
    oob = np.abs(target) > grid.k_max * (1.0 + 1e-12)
    return out, oob
