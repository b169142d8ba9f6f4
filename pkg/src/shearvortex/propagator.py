"""Exact linearized semigroup around plane Couette flow, and the Picard
fixed-point machinery built on it.

In Fourier variables the linearized vorticity equation transports modes
along the shear characteristic eta -> eta + t*xi while damping them with
an explicit anisotropic heat exponent; the enhanced x-diffusion grows like
t^3. The propagator below is exact on the resolvable band: the
characteristic transport is a frequency shear (a modulation in physical
space) and the damping is a diagonal multiplier.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    AliasingError,
    DivergenceError,
    DomainError,
    GridError,
    NoConvergenceError,
)
from .grid import Field
from .spectral import (
    biot_savart,
    dealias_mask,
    derivative,
    lp_norm,
    shear_spectrum,
)


def green_kernel(nu, t, x, y):
    """Fundamental solution of the linearized equation, evaluated pointwise.

    An anisotropic, sheared Gaussian: variance grows like nu*t^3 along x
    (shear-enhanced diffusion) and like nu*t along the tilted y direction.
    """
    nu = float(nu)
    t = np.asarray(t, dtype=np.float64)
    if nu <= 0:
        raise DomainError(f"viscosity must be positive, got {nu!r}")
    if np.any(t <= 0):
        raise DomainError("green_kernel requires t > 0")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    a = 1.0 + t ** 2 / 3.0
    b = 1.0 + t ** 2 / 12.0
    pref = 1.0 / (4.0 * np.pi * nu * t * np.sqrt(b))
    e1 = x ** 2 / (4.0 * nu * t * a)
    e2 = (a * y - 0.5 * t * x) ** 2 / (4.0 * nu * t * a * b)
    return pref * np.exp(-(e1 + e2))


def symbol_value(nu, t, xi, eta):
    """Damping multiplier of the propagator at one Fourier mode.

    Equals exp(-nu * integral over [0, t] of xi^2 + (eta + s*xi)^2 ds); the
    integral evaluates to xi^2 t + xi eta t^2 + eta^2 t + xi^2 t^3 / 3 and
    is nonnegative, so the multiplier never exceeds 1.
    """
    if nu <= 0:
        raise DomainError(f"viscosity must be positive, got {nu!r}")
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0):
        raise DomainError("symbol_value requires t >= 0")
    xi = np.asarray(xi, dtype=np.float64)
    eta = np.asarray(eta, dtype=np.float64)
    expo = t * (xi ** 2 + eta ** 2) + t ** 2 * xi * eta + (t ** 3 / 3.0) * xi ** 2
    return np.exp(-nu * expo)


@dataclass(frozen=True)
class LinearSymbol:
    """Propagator data at fixed (nu, t): multiplier plus mode transport."""

    nu: float
    t: float

    def multiplier(self, xi, eta):
        return symbol_value(self.nu, self.t, xi, eta)

    def source_mode(self, xi, eta):
        """Which initial mode feeds (xi, eta) after time t."""
        return xi, np.asarray(eta, dtype=float) + self.t * np.asarray(xi, dtype=float)


def apply_semigroup(f, nu, t, alias_tol=1e-9):
    """Advance a physical-frame vorticity field by the linear propagator.

    Exact on the resolvable band. Modes whose source lies outside the band
    are dropped (their true content is below resolution for a resolved
    field); if the dropped contribution would have been significant the
    input was under-resolved and an AliasingError identifies the worst
    offending mode.
    """
    if nu <= 0:
        raise DomainError(f"viscosity must be positive, got {nu!r}")
    t = float(t)
    if t < 0:
        raise DomainError("apply_semigroup requires t >= 0")
    if t == 0.0:
        return f
    grid = f.grid
    raw, oob = shear_spectrum(f.coeffs, grid, t)
    kx, ky = grid.wavegrid()
    out = raw * symbol_value(nu, t, kx, ky)
    if alias_tol is not None:
        # vet the input, not the shifted output: source modes with
        # |eta - t*xi| > k_max are never read by any resolvable target.
        # Their content is weighted by the viscous factor it would carry
        # at its (out of band) destination, since that is exactly what
        # the discarded contribution would have amounted to.
        lost = np.abs(ky - t * kx) > grid.k_max * (1.0 + 1e-12)
        if lost.any():
            kxf, kyf = np.broadcast_arrays(kx, ky)
            cin = np.abs(f.coeffs[lost]) * symbol_value(
                nu, t, kxf[lost], kyf[lost] - t * kxf[lost])
            ref = max(float(np.abs(f.coeffs).max()), 1e-300)
            worst = float(cin.max())
            if worst > alias_tol * ref:
                idx = np.argwhere(lost)[np.argmax(cin)]
                mode = (float(grid.k[idx[0]]), float(grid.k[idx[1]]))
                raise AliasingError(
                    f"shift t*xi moved significant content across the band "
                    f"(decay-weighted |lost|/|peak| = {worst / ref:.2e} "
                    f"at mode {mode})",
                    mode=mode)
    out[oob] = 0.0
    return Field(grid, coeffs=out)


@dataclass(frozen=True)
class Trajectory:
    """Time-sampled vorticity evolution at fixed viscosity."""

    times: tuple
    fields: tuple
    nu: float
    # solver convergence metadata (Picard update distance per iteration);
    # empty for hand-built trajectories
    history: tuple = ()

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        fields = tuple(self.fields)
        if len(times) == 0 or len(times) != len(fields):
            raise GridError("trajectory needs matching, nonempty times and fields")
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            raise DomainError("trajectory times must be strictly increasing")
        if times[0] < 0:
            raise DomainError("trajectory times must be nonnegative")
        grid = fields[0].grid
        if any(f.grid != grid for f in fields):
            raise GridError("trajectory fields must share one grid")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "fields", fields)

    def __len__(self):
        return len(self.times)

    @property
    def grid(self):
        return self.fields[0].grid


def kato_norm(traj):
    """sup over samples of (nu t <t>)^(1/4) ||omega(t)||_{L^{4/3}}.

    The weight vanishes at t = 0, so an initial sample at time zero does
    not contribute; <t> = (1 + t^2)^(1/2).
    """
    best = 0.0
    for t, f in zip(traj.times, traj.fields):
        w = (traj.nu * t * np.hypot(1.0, t)) ** 0.25
        if w == 0.0:
            continue
        best = max(best, w * lp_norm(f, 4.0 / 3.0))
    return best


def _lagrange_weights(ts, s, width=4):
    """Interpolation stencil (indices, weights) for time s on sample grid ts."""
    n = len(ts)
    width = min(width, n)
    # center the stencil on s, clamped to the sample range
    i = int(np.searchsorted(ts, s))
    lo = max(0, min(i - width // 2, n - width))
    idx = range(lo, lo + width)
    w = []
    for a in idx:
        num = 1.0
        for b in idx:
            if b != a:
                num *= (s - ts[b]) / (ts[a] - ts[b])
        w.append(num)
    return list(idx), w


def _field_at(traj, s):
    """Trajectory field at time s by polynomial interpolation of spectra."""
    ts = traj.times
    j = np.searchsorted(ts, s)
    if j < len(ts) and ts[j] == s:
        return traj.fields[j]
    idx, w = _lagrange_weights(ts, s)
    c = sum(wi * traj.fields[i].coeffs for i, wi in zip(idx, w))
    return Field(traj.grid, coeffs=c)


def _advection_divergence(omega1, omega2):
    """div(u1 * omega2) with u1 = biot_savart(omega1); dealiased product."""
    grid = omega1.grid
    keep = dealias_mask(grid)
    u1, u2 = biot_savart(Field(grid, coeffs=omega1.coeffs * keep))
    w = Field(grid, coeffs=omega2.coeffs * keep)
    p1 = Field(grid, values=u1.values * w.values)
    p2 = Field(grid, values=u2.values * w.values)
    d = derivative(p1, 1, 0).coeffs + derivative(p2, 0, 1).coeffs
    return Field(grid, coeffs=d * keep)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def _gl_nodes(a, b):
    """8-point Gauss-Legendre nodes/weights on [a, b]."""
    mid, rad = 0.5 * (a + b), 0.5 * (b - a)
    return mid + rad * _GL_NODES, rad * _GL_WEIGHTS


def _duhamel_targets(traj1, traj2, targets):
    """Bilinear Duhamel integrals at several target times.

    For each target t this integrates S(t - s) applied to the advection
    divergence of the pair over s in [t_first, t], using composite 8-point
    Gauss-Legendre panels on the sample intervals. The last interval is
    split geometrically toward s = t where the propagator symbol varies
    fastest.
    """
    if traj1.nu != traj2.nu or traj1.times != traj2.times:
        raise GridError("duhamel term needs trajectories on a common time grid")
    nu = traj1.nu
    ts = np.asarray(traj1.times)
    out = []
    for t in targets:
        t = float(t)
        if t < ts[0] or t > ts[-1] + 1e-12:
            raise DomainError(f"target time {t} outside trajectory range")
        if t == ts[0]:
            out.append(Field(traj1.grid, coeffs=np.zeros((traj1.grid.n,) * 2, complex)))
            continue
        panels = []
        full = ts[(ts > ts[0]) & (ts < t - 1e-14)]
        edges = np.concatenate(([ts[0]], full, [t]))
        for a, b in zip(edges[:-1], edges[1:-1]):
            panels.append((a, b))
        # graded split of the final interval toward s = t
        a0 = edges[-2]
        d = t - a0
        breaks = (a0, a0 + 0.5 * d, a0 + 0.75 * d, a0 + 0.875 * d, t)
        panels.extend(zip(breaks[:-1], breaks[1:]))
        acc = np.zeros((traj1.grid.n,) * 2, dtype=complex)
        for a, b in panels:
            nodes, weights = _gl_nodes(a, b)
            for s, w in zip(nodes, weights):
                g = _advection_divergence(_field_at(traj1, s), _field_at(traj2, s))
                acc += w * apply_semigroup(g, nu, t - s).coeffs
        out.append(Field(traj1.grid, coeffs=-acc))
    return out


def duhamel_bilinear(traj1, traj2, t):
    """The bilinear interaction term of the mild formulation at time t.

    Bilinear in its arguments and mass-free (it is a divergence), so for
    zero input it vanishes identically.
    """
    return _duhamel_targets(traj1, traj2, [t])[0]


def picard_solve(omega0, nu, horizon, n_times, max_iter=12, tol=1e-10,
                 t_start=0.0):
    """Iterate the mild formulation to its fixed point on [t_start, t_start+horizon].

    The iteration maps a trajectory to (linear flow of the data) plus the
    bilinear term of the trajectory with itself, sampled on a uniform time
    grid. Convergence is measured in the weighted Kato norm of successive
    differences, relative to the trajectory norm; the per-iteration
    distances are kept on the result as traj.history. Sustained growth of
    the differences raises DivergenceError, exhausting the budget raises
    NoConvergenceError.
    """
    if nu <= 0:
        raise DomainError(f"viscosity must be positive, got {nu!r}")
    if horizon <= 0 or n_times < 2:
        raise DomainError("need horizon > 0 and at least two sample times")
    if t_start < 0:
        raise DomainError("t_start must be nonnegative")
    times = tuple(t_start + horizon * j / (n_times - 1) for j in range(n_times))
    linear = tuple(apply_semigroup(omega0, nu, t - t_start) for t in times)
    traj = Trajectory(times=times, fields=linear, nu=nu)
    ratios = []
    dists = []
    last_dist = None
    for _ in range(max_iter):
        correction = _duhamel_targets(traj, traj, times)
        new_fields = tuple(lin + cor for lin, cor in zip(linear, correction))
        diff = Trajectory(times=times, nu=nu,
                          fields=tuple(a - b for a, b in zip(new_fields, traj.fields)))
        dist = kato_norm(diff)
        dists.append(dist)
        new_traj = Trajectory(times=times, fields=new_fields, nu=nu,
                              history=tuple(dists))
        scale = max(kato_norm(new_traj), 1e-300)
        if last_dist is not None and last_dist > 0:
            ratios.append(dist / last_dist)
            if len(ratios) >= 2 and ratios[-1] >= 1.0 and ratios[-2] >= 1.0:
                raise DivergenceError(
                    f"Picard differences growing (ratios {ratios[-2]:.3f}, {ratios[-1]:.3f}); "
                    "data too large for the contraction regime", ratios=ratios)
        traj = new_traj
        last_dist = dist
        if dist <= tol * scale:
            return traj
    raise NoConvergenceError(
        f"Picard iteration did not reach tol={tol:g} within {max_iter} iterations "
        f"(last relative update {last_dist / scale:.3e})", residual=last_dist)
