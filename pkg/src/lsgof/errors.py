"""Exception hierarchy shared across the package."""


class LsgofError(Exception):
    """Base class for all package-specific errors."""


class DomainError(LsgofError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UnsupportedFamilyError(LsgofError, ValueError):
    """A family was requested that the operation does not support."""


class DegenerateSampleError(LsgofError, ValueError):
    """Sample has (numerically) zero spread; scale cannot be estimated."""


class NonConvergenceError(LsgofError, RuntimeError):
    """An iterative solver failed to converge.

    The last iterate is attached so callers can inspect or report it.
    """

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class SingularMatrixError(LsgofError, ArithmeticError):
    """A matrix required to be invertible is numerically singular."""


class QuadratureError(LsgofError, RuntimeError):
    """Adaptive quadrature hit its depth limit before meeting tolerance.

    ``best_estimate`` carries the value accumulated so far.
    """

    def __init__(self, message, best_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate


class BracketError(LsgofError, ValueError):
    """Root-finding bracket does not enclose a sign change."""


class InfeasibleConstraintsError(LsgofError, RuntimeError):
    """Zero is outside the convex hull of the constraint rows.

    By caller convention the associated test statistic is +inf (always
    reject); see the empirical-likelihood test driver.
    """
