"""Exception types shared across the package."""


class DimensionMismatchError(ValueError):
    """Raised when tensor or matrix extents are incompatible for an operation."""


class InvalidStartError(ValueError):
    """Raised when an iterative process is started from a zero tensor."""


class BreakdownError(RuntimeError):
    """Raised when a decomposition in a breakdown state is asked to continue."""


class SingularProjectionError(RuntimeError):
    """Raised when an unregularized projected solve meets a rank-deficient matrix."""


class InfeasibleDiscrepancyError(ValueError):
    """Raised when the error bound is too large for the discrepancy equation to have a root."""
