"""Exception types raised by sphlis."""


class SphlisError(Exception):
    """Base class for all sphlis-specific errors."""


class VisibilityError(SphlisError):
    """A surface point (or a whole cap) cannot see the terminal."""


class QuadratureBudgetError(SphlisError):
    """Numerical integration ran out of its evaluation budget before
    reaching the requested tolerance.  Carries the partial result."""

    def __init__(self, message, value=None, error_estimate=None, n_evals=0):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate
        self.n_evals = n_evals


class DetectionError(SphlisError):
    """Boundary-angle detection failed (signal buried in noise)."""


class EstimationError(SphlisError):
    """A distance estimate could not be produced from the measurements."""


class LayoutError(SphlisError):
    """Invalid reflector layout (overlapping or oversized caps)."""
