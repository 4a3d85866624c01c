"""Exception types raised by the expskel library."""


class ExpSkelError(Exception):
    """Base class for library failures that are not plain input errors."""


class ExpSumOverflowError(ExpSkelError, OverflowError):
    """Raised when an unnormalized evaluation leaves the double exponent range."""


class RootOnContourError(ExpSkelError):
    """Raised when the target function vanishes (numerically) on a winding contour."""

    def __init__(self, message: str, min_modulus: float):
        super().__init__(message)
        self.min_modulus = min_modulus


class PreconditionError(ExpSkelError, ValueError):
    """Raised when a numeric precondition (e.g. c > log l) is not met."""


class SearchExhaustedError(ExpSkelError):
    """Raised when a randomized search runs out of tries."""

    def __init__(self, message: str, best_margin: float, best=None):
        super().__init__(message)
        self.best_margin = best_margin
        self.best = best


class ConsistencyError(ExpSkelError):
    """Raised when two independent computations of the same object disagree."""

    def __init__(self, message: str, discrepancy: float):
        super().__init__(message)
        self.discrepancy = discrepancy


class VerificationError(ExpSkelError):
    """Raised when a numerical verification fails; carries the failing report."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
