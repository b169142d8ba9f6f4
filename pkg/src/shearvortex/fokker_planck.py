"""Closed-form limit semigroup of the late-time generator.

In Fourier variables the limit generator advects coefficients along linear
characteristics while damping them through an explicit quadratic-form
exponent. The semigroup therefore reduces to (i) evaluating the initial
spectrum at the backward characteristic image of each lattice mode and
(ii) multiplying by the exponent factor. Off-lattice evaluation is done
with exact trigonometric (band-limited) interpolation, split into a shear
stage and a scaling stage so each stage is separable.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, ResolutionError, UnsupportedOrderError
from .grid import Field
from .spectral import shear_spectrum, spectral_tail_ratio

SQRT3 = np.sqrt(3.0)


def gaussian(grid):
    """The unit-mass Gaussian equilibrium (1/4pi) exp(-r^2/4)."""
    x1, x2 = grid.meshgrid()
    return Field(grid, values=np.exp(-(x1 ** 2 + x2 ** 2) / 4.0) / (4.0 * np.pi))


def eigenfunction(a, b, grid):
    """Derivative-ladder eigenfunction of the limit generator.

    Applying (d1 - sqrt3 d2) a times and (sqrt3 d1 - d2) b times to the
    Gaussian produces an eigenfunction with eigenvalue -(3a + b)/2. Orders
    with a + b = 0 return the Gaussian itself (eigenvalue 0).
    """
    a, b = int(a), int(b)
    if a < 0 or b < 0 or a + b > 4:
        raise UnsupportedOrderError(f"eigenfunction orders must satisfy 0 <= a+b <= 4, got ({a}, {b})")
    g = gaussian(grid)
    kx, ky = grid.wavegrid()
    # zero the Nyquist line as in first-order derivatives
    kx = kx.copy(); kx[grid.n // 2, 0] = 0.0
    ky = ky.copy(); ky[0, grid.n // 2] = 0.0
    d1 = 1j * kx
    d2 = 1j * ky
    mult = (d1 - SQRT3 * d2) ** a * (SQRT3 * d1 - d2) ** b
    return Field(grid, coeffs=g.coeffs * mult)


def eigenvalue(a, b):
    """Decay rate of eigenfunction(a, b) under the limit semigroup."""
    return -(3 * a + b) / 2.0


def symbol_exponent(tau, xi, eta):
    """Quadratic-form exponent Phi(tau, xi, eta) of the semigroup symbol.

    Always <= 0; tends to -(xi^2 + eta^2) as tau -> infinity, which is the
    Fourier transform exponent of the Gaussian equilibrium.
    """
    if np.any(np.asarray(tau) < 0):
        raise DomainError("tau must be nonnegative")
    e = np.exp(-np.asarray(tau, dtype=np.float64))
    return (-(1 - e) ** 3 * xi ** 2
            - 2.0 * SQRT3 * e * (1 - e) ** 2 * xi * eta
            - (1 - e) * (1 + 3 * e ** 2) * eta ** 2)


@dataclass(frozen=True)
class CharMap:
    """Backward characteristic map of Fourier modes over a time tau.

    Linear map with matrix [[m11, m12], [m21, m22]]; its determinant is
    exp(-2 tau) (two contracting directions with rates 1/2 and 3/2).
    """

    tau: float
    m11: float
    m12: float
    m21: float
    m22: float

    @property
    def det(self):
        return self.m11 * self.m22 - self.m12 * self.m21

    def apply(self, xi, eta):
        return self.m11 * xi + self.m12 * eta, self.m21 * xi + self.m22 * eta


def char_map(tau):
    """Backward characteristics as an explicit 2x2 map."""
    tau = float(tau)
    if tau < 0:
        raise DomainError("tau must be nonnegative")
    e1 = np.exp(-tau / 2.0)
    e3 = np.exp(-3.0 * tau / 2.0)
    return CharMap(
        tau=tau,
        m11=1.5 * e1 - 0.5 * e3,
        m12=-0.5 * SQRT3 * e1 + 0.5 * SQRT3 * e3,
        m21=0.5 * SQRT3 * e1 - 0.5 * SQRT3 * e3,
        m22=-0.5 * e1 + 1.5 * e3,
    )


def backward_characteristics(tau, xi, eta):
    """Where a mode (xi, eta) is read from after running for tau."""
    return char_map(tau).apply(np.asarray(xi, dtype=float), np.asarray(eta, dtype=float))


@lru_cache(maxsize=32)
def _phase_tables(n, half_width):
    """Cached outer-product ingredients for the interpolation stages."""
    L = half_width
    x = -L + (2.0 * L / n) * np.arange(n)
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=2.0 * L / n)
    return x, k


@lru_cache(maxsize=32)
def _checkerboard(n):
    """(-1)^(j+k) sign pattern relating fft-array coefficients to the
    continuous-phase spectrum on a box starting at -L."""
    s = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    return np.outer(s, s)


def _scale_stage(coeffs, grid, u11, u12, u22):
    """Trig-exact evaluation at (u11*xi_j + u12*eta_k, u22*eta_k).

    Written as two dense 1-D transforms (matrix products) with a phase in
    between; exact for the discrete model, cost O(n^3).
    """
    n = grid.n
    x, k = _phase_tables(n, grid.half_width)
    v = np.fft.ifft2(coeffs) * n ** 2  # physical samples (complex mid-pipeline)
    e2 = np.exp(-1j * np.outer(x, u22 * k))        # [q, k]
    t = v @ e2                                      # [p, k]
    t *= np.exp(-1j * np.outer(x, u12 * k))         # phase in x_p for each eta_k
    e1 = np.exp(-1j * np.outer(u11 * k, x))        # [j, p]
    out = (e1 @ t) / n ** 2
    out *= _checkerboard(n)  # back to fft-array sign convention
    band = grid.k_max * (1.0 + 1e-12)
    out[np.abs(u11 * k[:, None] + u12 * k[None, :]) > band] = 0.0
    if abs(u22) * np.abs(k).max() > band:
        out[:, np.abs(u22 * k) > band] = 0.0
    return out


def apply_semigroup(f, tau, tail_check=True):
    """Advance a field by the limit semigroup over a time tau >= 0.

    The zero mode is exactly preserved, so the mass of the field is
    invariant. The input spectrum should be resolved (decayed well before
    the band edge); otherwise the characteristic shift moves significant
    content across the band and the result is unreliable.
    """
    tau = float(tau)
    if tau < 0:
        raise DomainError("tau must be nonnegative")
    if tau == 0.0:
        return f
    if tail_check:
        r = spectral_tail_ratio(f)
        if r > 1e-8:
            raise ResolutionError(
                f"spectrum not resolved: outer-band ratio {r:.2e} exceeds 1e-08")
    m = char_map(tau)
    # LU split: the backward map factors into a frequency shear followed by
    # an upper-triangular scaling; m11 > 0 for every tau >= 0.
    slope = m.m21 / m.m11
    u11 = m.m11
    u12 = m.m12
    u22 = m.det / m.m11
    c, oob = shear_spectrum(f.coeffs, f.grid, slope)
    c[oob] = 0.0
    c = _scale_stage(c, f.grid, u11, u12, u22)
    kx, ky = f.grid.wavegrid()
    c *= np.exp(symbol_exponent(tau, kx, ky))
    return Field(f.grid, coeffs=c)
