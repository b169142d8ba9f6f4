"""Exception types shared across the toolkit.

The CLI maps these onto process exit codes: configuration problems exit
with 2, solver failures (divergence, blow-up, no convergence) with 3 and
resolution problems (aliasing, truncation, under-resolved data) with 4.
"""


class ShearVortexError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(ShearVortexError):
    """Invalid run configuration. Carries line/column when parsed from text."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class GridError(ShearVortexError):
    """Invalid grid specification or mismatched grids."""


class UnsupportedOrderError(ShearVortexError):
    """Requested derivative or weight order outside the supported range."""


class DomainError(ShearVortexError):
    """Argument outside the mathematical domain of an operation."""


class AliasingError(ShearVortexError):
    """Significant spectral content moved across the resolvable band."""

    def __init__(self, message, mode=None):
        self.mode = mode  # offending (xi, eta) pair, if identified
        super().__init__(message)


class TruncationError(ShearVortexError):
    """Field not localized inside its box; carries the measured tail."""

    def __init__(self, message, tail=None):
        self.tail = tail
        super().__init__(message)


class ResolutionError(ShearVortexError):
    """Requested feature cannot be represented on the given grid."""


class FitError(ShearVortexError):
    """Exponent fit rejected (too few samples in the window)."""


class SolverError(ShearVortexError):
    """Base class for iteration/integration failures."""


class DivergenceError(SolverError):
    """Fixed-point iteration diverging. Carries the measured ratios."""

    def __init__(self, message, ratios=None):
        self.ratios = ratios
        super().__init__(message)


class NoConvergenceError(SolverError):
    """Iteration exhausted its budget without meeting the tolerance."""

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class BlowUpError(SolverError):
    """Time integration detected unbounded growth; keeps the last good state."""

    def __init__(self, message, last_state=None):
        self.last_state = last_state
        super().__init__(message)


class SnapshotError(ShearVortexError):
    """Snapshot file unreadable, truncated or inconsistent."""


class ChecksumError(SnapshotError):
    """Snapshot payload does not match the recorded checksum."""
