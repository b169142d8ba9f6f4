"""Norm time series, exponent fitting, energy functionals and
empirical-constant probes for the frame dynamics.

The hypocoercive energy pair (E, D) mixes weighted norms of derivatives
up to third order with log-time factors and a ladder of small constants;
the constants must satisfy explicit ratio constraints for E to stay
coercive, and those constraints are validated on construction.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, FitError
from .fokker_planck import gaussian
from .grid import Field
from .propagator import apply_semigroup as heat_shear_semigroup
from .selfsim import invert_frame_laplacian
from .spectral import derivative, lp_norm, mass, weighted_inner, weighted_norm

#: fixed exponent grid for the L^p columns (4/3 is the fixed-point norm)
P_GRID = (1.0, 4.0 / 3.0, 2.0, np.inf)

_RATIO = 10.0  # enforced separation factor between consecutive constants


@dataclass(frozen=True)
class EnergyCoefficients:
    """Constant ladder (c1..c7) of the energy pair, with anchor t0 and
    weight exponent m.

    The ladder must satisfy c1 >> c2 = c4 >> c3 >> c5 >> c6 >> c7 together
    with c1^2 << c2, c2^2 << c1 c3, c5^2 << c3 c6 and c6^2 << c5 c7; every
    ">>"/"<<" is enforced here as a factor-10 inequality. These conditions
    make the cross terms of E dominated by the squares, so E >= 0.
    """

    c1: float
    c2: float
    c3: float
    c4: float
    c5: float
    c6: float
    c7: float
    t0: float = 1.0
    m: float = 2.0

    def __post_init__(self):
        cs = (self.c1, self.c2, self.c3, self.c4, self.c5, self.c6, self.c7)
        if any(c <= 0 for c in cs):
            raise DomainError("all energy constants must be positive")
        if self.t0 <= 0:
            raise DomainError("anchor time t0 must be positive")
        if self.m <= 1:
            raise DomainError("weight exponent m must exceed 1")
        if self.c2 != self.c4:
            raise DomainError("need c2 = c4")
        chain = (("1", 1.0, "c1", self.c1), ("c1", self.c1, "c2", self.c2),
                 ("c2", self.c2, "c3", self.c3), ("c3", self.c3, "c5", self.c5),
                 ("c5", self.c5, "c6", self.c6), ("c6", self.c6, "c7", self.c7))
        # 1e-12 relative slack admits ladders that hit factor 10 exactly
        for big_name, big, small_name, small in chain:
            if _RATIO * small > big * (1.0 + 1e-12):
                raise DomainError(
                    f"need {big_name} >= {_RATIO:g} * {small_name}")
        prods = (("c1^2", self.c1 ** 2, "c2", self.c2),
                 ("c2^2", self.c2 ** 2, "c1*c3", self.c1 * self.c3),
                 ("c5^2", self.c5 ** 2, "c3*c6", self.c3 * self.c6),
                 ("c6^2", self.c6 ** 2, "c5*c7", self.c5 * self.c7))
        for small_name, small, big_name, big in prods:
            if _RATIO * small > big * (1.0 + 1e-12):
                raise DomainError(
                    f"need {big_name} >= {_RATIO:g} * {small_name}")

    @classmethod
    def from_scale(cls, A=10.0, t0=1.0, m=2.0):
        """One-parameter ladder (A^-3, A^-5, A^-6, A^-5, A^-9, A^-11, A^-12);
        satisfies every ratio constraint for A >= 10."""
        return cls(c1=A ** -3, c2=A ** -5, c3=A ** -6, c4=A ** -5,
                   c5=A ** -9, c6=A ** -11, c7=A ** -12, t0=t0, m=m)


@dataclass(frozen=True)
class RecordOptions:
    """Which quantities record() computes per sample."""

    weight_exponents: tuple = (2.0, 3.0)
    derivative_norms: tuple = ()        # extra (m, a, b) weighted norms
    energy: EnergyCoefficients = None   # set to also record (E, D)


@dataclass(frozen=True)
class DiagnosticsRecord:
    """One time sample of the monitored quantities."""

    t: float
    tau: float
    mass: float
    lp_norms: dict
    weighted: dict
    convergence_L2m: dict
    convergence_L1_phys: float
    energy: float = None
    dissipation: float = None


def record(state, opts=None):
    """Compute the configured diagnostics for one frame state.

    convergence_L2m is the weighted-L2 distance to alpha times the fixed
    Gaussian for each configured m. The physical-frame L1 distance equals
    the frame-coordinates L1 distance exactly (the amplitude factor
    cancels the Jacobian), so no resampling is involved.
    """
    opts = opts or RecordOptions()
    om = state.omega
    grid = om.grid
    diff = om - (state.alpha * gaussian(grid))
    lp = {p: float(lp_norm(om, p)) for p in P_GRID}
    weighted = {}
    for m in opts.weight_exponents:
        weighted[(m, 0, 0)] = float(weighted_norm(om, m))
    for m, a, b in opts.derivative_norms:
        weighted[(m, a, b)] = float(weighted_norm(om, m, a, b))
    conv = {m: float(weighted_norm(diff, m)) for m in opts.weight_exponents}
    e = d = None
    if opts.energy is not None:
        e, d = energy_functionals(om, state.t, opts.energy)
    return DiagnosticsRecord(
        t=state.t, tau=state.tau, mass=float(mass(om)), lp_norms=lp,
        weighted=weighted, convergence_L2m=conv,
        convergence_L1_phys=float(lp_norm(diff, 1)), energy=e, dissipation=d)


def rate_fit(series, window=None):
    """Least-squares slope of log(value) against log(t), with its
    standard error. Needs at least 5 samples in the window, all positive."""
    pts = [(float(t), float(v)) for t, v in series]
    if window is not None:
        ta, tb = window
        pts = [(t, v) for t, v in pts if ta <= t <= tb]
    if len(pts) < 5:
        raise FitError(f"rate fit needs >= 5 samples, got {len(pts)}")
    t = np.array([p[0] for p in pts])
    v = np.array([p[1] for p in pts])
    if np.any(t <= 0) or np.any(v <= 0):
        raise DomainError("rate fit needs positive times and values")
    x = np.log(t)
    y = np.log(v)
    dx = x - x.mean()
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise DomainError("rate fit window must span distinct times")
    slope = float(dx @ y) / sxx
    resid = y - y.mean() - slope * dx
    rss = float(resid @ resid)
    stderr = np.sqrt(max(rss, 0.0) / ((len(pts) - 2) * sxx))
    return slope, float(stderr)


# derivative multi-indices appearing in E and D
_E_TERMS = (
    # (coefficient index 0..7 with 0 meaning 1.0, log power, kind)
    (0, 0, ("norm", 0, 0)),
    (1, 1, ("norm", 0, 1)),
    (2, 2, ("inner", (1, 0), (0, 1))),
    (3, 3, ("norm", 1, 0)),
    (4, 2, ("norm", 0, 2)),
    (5, 4, ("norm", 1, 1)),
    (6, 5, ("inner", (2, 0), (1, 1))),
    (7, 6, ("norm", 2, 0)),
)
_D_TERMS = (
    (0, 0, ("pair", (1, 0), (0, 1))),
    (1, 1, ("pair", (1, 1), (0, 2))),
    (2, 2, ("norm", 1, 0)),
    (3, 3, ("pair", (2, 0), (1, 1))),
    (4, 2, ("pair", (1, 2), (0, 3))),
    (5, 4, ("pair", (2, 1), (1, 2))),
    (6, 5, ("norm", 2, 0)),
    (7, 6, ("pair", (3, 0), (2, 1))),
)


def energy_functionals(omega, t, coef):
    """The energy E(t) and dissipation D(t) of the hypocoercive pair.

    Every term is a weighted-L2 norm or inner product of derivatives of
    omega (orders up to 3), scaled by a constant from the ladder, a power
    of ln(t/t0), and, inside D, a factor 1/(1+t^2) on the sheared-
    direction derivative of each pair.
    """
    if t < coef.t0:
        raise DomainError(f"energy functionals need t >= t0 = {coef.t0}")
    m = coef.m
    log = float(np.log(t / coef.t0))
    decay = 1.0 / (1.0 + t * t)
    cs = (1.0, coef.c1, coef.c2, coef.c3, coef.c4, coef.c5, coef.c6, coef.c7)
    norms = {}

    def norm2(a, b):
        if (a, b) not in norms:
            norms[(a, b)] = float(weighted_norm(omega, m, a, b)) ** 2
        return norms[(a, b)]

    e = 0.0
    for ci, lp, term in _E_TERMS:
        if term[0] == "norm":
            val = norm2(term[1], term[2])
        else:
            f = derivative(omega, *term[1])
            g = derivative(omega, *term[2])
            val = float(weighted_inner(f, g, m))
        e += cs[ci] * log ** lp * val
    d = 0.0
    for ci, lp, term in _D_TERMS:
        if term[0] == "norm":
            val = norm2(term[1], term[2])
        else:
            val = decay * norm2(*term[1]) + norm2(*term[2])
        d += cs[ci] * log ** lp * val
    return e, d


@dataclass(frozen=True)
class ProbeReport:
    """Empirical constants of one inequality over an ensemble."""

    kind: str
    params: dict
    entries: tuple            # (field index, t, ratio) triples
    max_ratio: float
    mean_ratio: float
    argmax: tuple             # (field index, t) of the maximizer


PROBE_KINDS = ("biot_savart_linf", "anisotropic_sigma", "semigroup_lp")


def _stream_gradient_sup(f, t):
    """sup norms of the two stream-function derivatives in the frame."""
    g = invert_frame_laplacian(f, t)
    gx = float(lp_norm(derivative(g, 1, 0), np.inf))
    gy = float(lp_norm(derivative(g, 0, 1), np.inf))
    return gx, gy


def _ratio_biot_savart(f, t, m):
    gx, gy = _stream_gradient_sup(f, t)
    bracket = np.sqrt(1.0 + t * t)
    lhs = gx + bracket * gy
    p_hi = 2.0 * m / (m - 1.0)
    p_lo = 2.0 * m / (m + 1.0)
    rhs = bracket ** 1.5 * np.sqrt(float(lp_norm(f, p_hi)) * float(lp_norm(f, p_lo)))
    return lhs / rhs


def _ratio_anisotropic(f, t, sigma):
    gx, gy = _stream_gradient_sup(f, t)
    bracket = np.sqrt(1.0 + t * t)
    lhs = gx + bracket * gy
    rhs = (bracket ** (1.0 + sigma)
           * float(weighted_norm(f, 1.0)) ** (0.5 + sigma)
           * float(weighted_norm(f, 1.0, 1, 0)) ** (0.5 - sigma))
    return lhs / rhs


def _ratio_semigroup(f, t, nu):
    """Worst constant over the smoothing bounds L1 -> L2, L1 -> Linf and
    the divergence-form variant L1 -> L2."""
    # norm ratios tolerate a looser band guard than solver paths: at
    # large t the shift sheds only deeply decayed spectrum-floor content
    g = heat_shear_semigroup(f, nu, t, alias_tol=1e-6)
    n1 = float(lp_norm(f, 1))
    spread = nu * t * np.sqrt(1.0 + t * t)
    r1 = float(lp_norm(g, 2)) * spread ** 0.5 / n1
    r2 = float(lp_norm(g, np.inf)) * spread / n1
    gd = heat_shear_semigroup(derivative(f, 1, 0), nu, t, alias_tol=1e-6)
    r3 = float(lp_norm(gd, 2)) * np.sqrt(nu * t) * spread ** 0.5 / n1
    return max(r1, r2, r3)


def inequality_probe(kind, ensemble, times, m=2.0, sigma=0.25, nu=1.0):
    """Measure LHS/RHS (constants stripped) of one of the a priori
    inequalities over an ensemble of fields and a list of times.

    Zero fields are skipped with a warning; ratios must come out finite.
    Returns a deterministic report with max, mean, and the maximizer.
    """
    if kind not in PROBE_KINDS:
        raise DomainError(f"unknown probe kind {kind!r}; use one of {PROBE_KINDS}")
    ensemble = list(ensemble)
    if not ensemble:
        raise DomainError("probe ensemble must be nonempty")
    if kind == "biot_savart_linf" and m <= 1:
        raise DomainError("biot-savart probe needs m > 1")
    if kind == "anisotropic_sigma" and not 0 < sigma < 0.5:
        raise DomainError("anisotropic probe needs 0 < sigma < 1/2")
    entries = []
    for i, f in enumerate(ensemble):
        if float(lp_norm(f, np.inf)) == 0.0:
            warnings.warn(f"probe skips zero field at index {i}", RuntimeWarning,
                          stacklevel=2)
            continue
        for t in times:
            if kind == "biot_savart_linf":
                r = _ratio_biot_savart(f, t, m)
            elif kind == "anisotropic_sigma":
                r = _ratio_anisotropic(f, t, sigma)
            else:
                r = _ratio_semigroup(f, t, nu)
            if not np.isfinite(r):
                raise DomainError(
                    f"probe ratio not finite for field {i} at t={t}")
            entries.append((i, float(t), float(r)))
    if not entries:
        raise DomainError("probe ensemble contained only zero fields")
    ratios = np.array([e[2] for e in entries])
    top = int(np.argmax(ratios))
    params = {"m": m} if kind == "biot_savart_linf" else (
        {"sigma": sigma} if kind == "anisotropic_sigma" else {"nu": nu})
    return ProbeReport(kind=kind, params=params, entries=tuple(entries),
                       max_ratio=float(ratios.max()),
                       mean_ratio=float(ratios.mean()),
                       argmax=(entries[top][0], entries[top][1]))
