"""Self-similar frame: coordinate changes, frame generator, nonlinear term
and the log-time pseudo-spectral evolver.

The frame rescales physical coordinates by the spreading scales of the
linear kernel (shear-enhanced along x) and rescales vorticity by the
kernel decay rate, so the kernel itself becomes the fixed Gaussian
(1/4pi) exp(-(X^2+Y^2)/4). Evolution in the frame uses tau = ln t; the
frame generator has time-dependent coefficients converging at rate 1/t^2
to the limit generator handled in closed form by the fokker_planck module.
"""

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import BlowUpError, DomainError, GridError, ResolutionError, TruncationError
from .grid import Field, Frame
from .spectral import (
    dealias_mask,
    derivative,
    lp_norm,
    mass,
    spectral_tail_ratio,
    tail_mass_ratio,
)

SQRT3 = np.sqrt(3.0)


@dataclass(frozen=True)
class FrameCoefficients:
    """Scalar coefficients of the frame generator at a fixed time.

    diff1/diff2 multiply the sheared and plain second derivatives, mix is
    the shear slope inside the tilted derivative, dil1/dil2 the two
    dilation drifts, rot the rotation, const the zeroth-order term and
    nonlin the (viscosity-free) prefactor of the advection term. As
    t -> infinity they converge, at rate 1/t^2, to
    (0, sqrt(3), 4, 0, 2, sqrt(3)/2, 2, 0).
    """

    t: float
    diff1: float
    mix: float
    diff2: float
    dil1: float
    dil2: float
    rot: float
    const: float
    nonlin: float

    @classmethod
    def at_time(cls, t):
        # the coefficient formulas are regular down to t = 0 (where the
        # diffusion part reduces to the plain Laplacian), unlike the frame
        # change itself which needs t > 0
        t = float(t)
        if t < 0:
            raise DomainError("frame coefficients need t >= 0")
        a = 1.0 + t * t / 3.0
        b = 1.0 + t * t / 12.0
        return cls(
            t=t,
            diff1=1.0 / a,
            mix=0.5 * t / np.sqrt(b),
            diff2=a / b,
            dil1=0.5 / a,
            dil2=0.5 * a / b,
            rot=0.25 * t / np.sqrt(b) * (9.0 + t * t) / (3.0 + t * t),
            const=(12.0 + 2.0 * t * t) / (12.0 + t * t),
            nonlin=1.0 / b,
        )

    @classmethod
    def limit(cls):
        """Late-time limit values (the limit-generator coefficients)."""
        return cls(t=np.inf, diff1=0.0, mix=SQRT3, diff2=4.0, dil1=0.0,
                   dil2=2.0, rot=0.5 * SQRT3, const=2.0, nonlin=0.0)


def selfsim_coords(t, nu, x, y):
    """Map physical coordinates to self-similar coordinates at time t."""
    t = float(t)
    nu = float(nu)
    if t <= 0 or nu <= 0:
        raise DomainError("selfsim coordinates need t > 0 and nu > 0")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    a = 1.0 + t * t / 3.0
    b = 1.0 + t * t / 12.0
    X = x / np.sqrt(nu * t * a)
    Y = (a * y - 0.5 * t * x) / np.sqrt(nu * t * a * b)
    return X, Y


def amplitude(t, nu):
    """Vorticity rescaling factor of the frame: nu t sqrt(1 + t^2/12)."""
    return nu * t * np.sqrt(1.0 + t * t / 12.0)


def _frame_map(t, nu):
    """Lower-triangular map (X, Y) -> (x, y) = (a X, c X + b Y)."""
    A = 1.0 + t * t / 3.0
    B = 1.0 + t * t / 12.0
    a = np.sqrt(nu * t * A)
    b = np.sqrt(nu * t * B / A)
    c = 0.5 * t * np.sqrt(nu * t / A)
    return a, c, b


@dataclass(frozen=True)
class SelfSimilarState:
    """Vorticity in the self-similar frame at a physical time t >= 1.

    alpha caches the total mass (conserved along the flow); the frame
    change is singular at t = 0, and runs are started at t >= 1 where the
    frame is well conditioned.
    """

    omega: Field
    t: float
    nu: float
    alpha: float = None

    def __post_init__(self):
        if self.omega.grid.frame != Frame.SELFSIM:
            raise GridError("state field must live on a selfsim-frame grid")
        if self.t < 1.0:
            raise DomainError(f"state time must be >= 1, got {self.t!r}")
        if self.nu <= 0:
            raise DomainError(f"viscosity must be positive, got {self.nu!r}")
        if self.alpha is None:
            object.__setattr__(self, "alpha", mass(self.omega))

    @property
    def tau(self):
        return float(np.log(self.t))


def _affine_eval(src, a, c, b, target_grid, amp):
    """amp * f(a X_p, c X_p + b Y_q) for the band-limited extension of f.

    Exact trigonometric evaluation written as two dense 1-D stages (the
    map is lower triangular, so the exponents separate). Target points
    that leave the source box read its periodic extension, which is
    harmless only for fields that decay inside the box.
    """
    cs = src.coeffs
    n = src.grid.n
    sign = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    chat = cs * np.outer(sign, sign)  # continuous-phase spectrum
    k = src.grid.k
    Xp = target_grid.x
    Yq = target_grid.x
    e1 = np.exp(1j * np.outer(Xp, a * k))          # [p, j]
    A = e1 @ chat                                   # [p, k]
    A *= np.exp(1j * np.outer(Xp, c * k))           # phase in X_p per eta_k
    e2 = np.exp(1j * np.outer(b * k, Yq))           # [k, q]
    vals = (A @ e2).real * amp
    return Field(target_grid, values=vals)


def _check_tail(f, tol, what):
    r = tail_mass_ratio(f)
    if r > tol:
        raise TruncationError(
            f"{what} not localized: tail mass ratio {r:.2e} exceeds {tol:g}", tail=r)


# resampling evaluates the periodic extension of the source, so a target
# box reaching past the source box reads periodic copies; replication of
# bulk values shows up as O(1) tail mass in the output
_WRAP_TOL = 1e-4


def _check_wrap(f, what):
    r = tail_mass_ratio(f)
    if r > _WRAP_TOL:
        raise TruncationError(
            f"{what} has tail mass ratio {r:.2e}: the target box wraps into "
            "the source bulk (grids are incompatible at this time)", tail=r)


def phys_to_selfsim(omega, t, nu, target_grid, tail_tol=1e-8):
    """Resample a physical-frame vorticity field into the frame at time t.

    Mass is preserved exactly in exact arithmetic (the amplitude cancels
    the Jacobian); the input must be localized well inside its box.
    """
    if omega.grid.frame != Frame.PHYSICAL:
        raise GridError("phys_to_selfsim expects a physical-frame field")
    if target_grid.frame != Frame.SELFSIM:
        raise GridError("target grid must be a selfsim-frame grid")
    _check_tail(omega, tail_tol, "physical field")
    a, c, b = _frame_map(t, nu)
    out = _affine_eval(omega, a, c, b, target_grid, amplitude(t, nu))
    _check_wrap(out, "resampled frame field")
    return SelfSimilarState(omega=out, t=float(t), nu=float(nu))


def selfsim_to_phys(state, target_grid, tail_tol=1e-8):
    """Resample a frame state back to a physical-frame vorticity field."""
    if target_grid.frame != Frame.PHYSICAL:
        raise GridError("target grid must be a physical-frame grid")
    _check_tail(state.omega, tail_tol, "frame field")
    a, c, b = _frame_map(state.t, state.nu)
    # inverse of (x, y) = (a X, c X + b Y) is lower triangular as well
    out = _affine_eval(state.omega, 1.0 / a, -c / (a * b), 1.0 / b,
                       target_grid, 1.0 / amplitude(state.t, state.nu))
    _check_wrap(out, "resampled physical field")
    return out


def _laplacian_symbol(grid, t):
    """Fourier symbol of the frame Laplacian (nonpositive; zero at 0)."""
    co = FrameCoefficients.at_time(t)
    kx, ky = grid.wavegrid()
    return -(co.diff1 * (kx - co.mix * ky) ** 2 + co.diff2 * ky ** 2)


def _limit_laplacian_symbol(grid):
    _, ky = grid.wavegrid()
    return -4.0 * ky ** 2


def invert_frame_laplacian(f, t):
    """Solve the frame Laplacian with the mean-zero gauge (zero mode -> 0)."""
    sym = _laplacian_symbol(f.grid, t)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = f.coeffs / sym
    c[0, 0] = 0.0
    return Field(f.grid, coeffs=c)


def apply_frame_laplacian(f, t):
    return Field(f.grid, coeffs=f.coeffs * _laplacian_symbol(f.grid, t))


def _drift_values(f, co, grid):
    """Physical-space samples of the first-order and zeroth-order terms."""
    fx = derivative(f, 1, 0).values
    fy = derivative(f, 0, 1).values
    X, Y = grid.meshgrid()
    sheared = fx - co.mix * fy
    out = co.dil1 * (X - co.mix * Y) * sheared
    out += co.dil2 * Y * fy
    out += co.rot * (X * fy - Y * fx)
    out += co.const * f.values
    return out


def apply_generator(f, t):
    """Full frame generator at time t (diffusion + drifts + constant)."""
    grid = f.grid
    co = FrameCoefficients.at_time(t)
    drift = Field(grid, values=_drift_values(f, co, grid))
    return Field(grid, coeffs=f.coeffs * _laplacian_symbol(grid, t) + drift.coeffs)


def apply_limit_generator(f):
    """Late-time limit generator: 4 d_Y^2 + 2 Y d_Y + 2 + rotation."""
    grid = f.grid
    co = FrameCoefficients.limit()
    fx = derivative(f, 1, 0).values
    fy = derivative(f, 0, 1).values
    X, Y = grid.meshgrid()
    drift = co.dil2 * Y * fy + co.rot * (X * fy - Y * fx) + co.const * f.values
    return Field(grid, coeffs=f.coeffs * _limit_laplacian_symbol(grid)
                 + Field(grid, values=drift).coeffs)


def nonlinear_term(f, t, nu):
    """Self-advection term of the frame equation, dealiased (2/3 rule).

    A Poisson bracket of the field with its frame stream function; exactly
    mass-free, and weighted by 1/(nu (1 + t^2/12)).
    """
    if nu <= 0:
        raise DomainError(f"viscosity must be positive, got {nu!r}")
    grid = f.grid
    keep = dealias_mask(grid)
    fd = Field(grid, coeffs=f.coeffs * keep)
    g = invert_frame_laplacian(fd, t)
    fx = derivative(fd, 1, 0).values
    fy = derivative(fd, 0, 1).values
    gx = derivative(g, 1, 0).values
    gy = derivative(g, 0, 1).values
    co = FrameCoefficients.at_time(t)
    bracket = Field(grid, values=gy * fx - gx * fy)
    return Field(grid, coeffs=bracket.coeffs * keep * (co.nonlin / nu))


@dataclass(frozen=True)
class StepControl:
    """Evolver step-size and monitoring knobs."""

    dtau: float = 2e-3
    samples_per_decade: int = 16
    growth_factor: float = 10.0   # one-step L2 growth that flags instability
    max_halvings: int = 3
    cfl_limit: float = 1.7        # bound on dtau * skew advection rate
    tail_tol: float = 1e-6
    on_tail: str = "error"        # "error", "warn" or "ignore"
    check_every: int = 25

    def __post_init__(self):
        if self.dtau <= 0:
            raise DomainError("dtau must be positive")
        if self.samples_per_decade < 4:
            raise DomainError("need at least 4 samples per decade")
        if self.on_tail not in ("error", "warn", "ignore"):
            raise DomainError(f"unknown tail action {self.on_tail!r}")


def _skew_rate(co, grid):
    """Undamped advection rate estimate used by the step-size check."""
    L = grid.half_width
    return (co.rot + co.dil1 * (1.0 + co.mix ** 2)) * L * grid.k_max


def _tail_monitor(f, control, t):
    spec_tail = spectral_tail_ratio(f)
    phys_tail = tail_mass_ratio(f)
    worst = max(spec_tail, phys_tail)
    if worst <= control.tail_tol:
        return
    msg = (f"resolution monitor at t={t:.6g}: spectral tail {spec_tail:.2e}, "
           f"box tail {phys_tail:.2e} exceed {control.tail_tol:g}")
    if control.on_tail == "error":
        raise ResolutionError(msg)
    if control.on_tail == "warn":
        warnings.warn(msg, RuntimeWarning, stacklevel=3)


def evolve(state, t_end, control=None, nonlinear=True, observer=None):
    """Advance a frame state to t_end; returns (final state, records).

    Integrates in tau = ln t. Diffusion is applied exactly through an
    integrating factor with the symbol frozen at the step midpoint; the
    remaining terms (drifts, constant, advection and the frozen-symbol
    correction) advance with an explicit third-order Runge-Kutta stage
    cycle, which keeps the skew drift terms inside the stability region.
    Samples are logarithmically spaced; each sample calls the observer
    (default: diagnostics.record) and its results are returned in order.
    """
    control = control or StepControl()
    if t_end < state.t:
        raise DomainError("t_end must be >= the state time")
    if observer is None:
        from .diagnostics import record as observer  # default observer
    grid = state.omega.grid
    nu = state.nu
    alpha = state.alpha
    kx, ky = grid.wavegrid()

    def rhs(tau_s, coeffs, sym_mid):
        t_s = np.exp(tau_s)
        co = FrameCoefficients.at_time(t_s)
        f = Field(grid, coeffs=coeffs)
        out = Field(grid, values=_drift_values(f, co, grid)).coeffs.copy()
        out += (_laplacian_symbol(grid, t_s) - sym_mid) * coeffs
        if nonlinear:
            out += nonlinear_term(f, t_s, nu).coeffs
        return out

    tau = float(np.log(state.t))
    tau_end = float(np.log(t_end))
    ln10 = float(np.log(10.0))
    sample_taus = [tau]
    j = 1
    while True:
        s = float(np.log(state.t)) + j * ln10 / control.samples_per_decade
        if s >= tau_end - 1e-12:
            break
        sample_taus.append(s)
        j += 1
    if tau_end > tau:
        sample_taus.append(tau_end)

    c = state.omega.coeffs.copy()
    records = [observer(state)]
    steps_done = 0
    for target in sample_taus[1:]:
        while tau < target - 1e-13:
            h = min(control.dtau, target - tau)
            t_mid = np.exp(tau + 0.5 * h)
            rate = _skew_rate(FrameCoefficients.at_time(t_mid), grid)
            if h * rate > control.cfl_limit:
                raise ResolutionError(
                    f"tau step {h:.3e} exceeds stability bound "
                    f"{control.cfl_limit / rate:.3e} at t={t_mid:.4g} "
                    "(refine dtau or coarsen the grid)")
            norm0 = float(np.linalg.norm(c))
            attempt = h
            for halving in range(control.max_halvings + 1):
                c_new = c
                tau_new = tau
                nsub = 2 ** halving
                ok = True
                for _ in range(nsub):
                    hh = attempt
                    sym_mid = _laplacian_symbol(grid, np.exp(tau_new + 0.5 * hh))
                    E = np.exp(hh * sym_mid)
                    Eh = np.exp(0.5 * hh * sym_mid)
                    k1 = rhs(tau_new, c_new, sym_mid)
                    ca = Eh * (c_new + 0.5 * hh * k1)
                    k2 = rhs(tau_new + 0.5 * hh, ca, sym_mid)
                    cb = E * (c_new - hh * k1) + 2.0 * hh * Eh * k2
                    k3 = rhs(tau_new + hh, cb, sym_mid)
                    c_new = E * c_new + (hh / 6.0) * (E * k1 + 4.0 * Eh * k2 + k3)
                    tau_new += hh
                    if not np.all(np.isfinite(c_new)):
                        ok = False
                        break
                if ok and float(np.linalg.norm(c_new)) <= control.growth_factor * max(norm0, 1e-300):
                    break
                attempt *= 0.5
            else:
                raise BlowUpError(
                    f"instability at t={np.exp(tau):.4g}: one-step growth exceeded "
                    f"{control.growth_factor}x even after {control.max_halvings} halvings",
                    last_state=replace(state, omega=Field(grid, coeffs=c),
                                       t=float(np.exp(tau)), alpha=alpha))
            c = c_new
            tau = tau_new
            steps_done += 1
            if steps_done % control.check_every == 0:
                _tail_monitor(Field(grid, coeffs=c), control, np.exp(tau))
        state = SelfSimilarState(omega=Field(grid, coeffs=c), t=float(np.exp(tau)),
                                 nu=nu, alpha=alpha)
        _tail_monitor(state.omega, control, state.t)
        records.append(observer(state))
    return state, records
