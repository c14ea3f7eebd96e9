"""Exception hierarchy shared across the package."""


class SpinBECError(Exception):
    """Base class for all package errors."""


class ConfigurationError(SpinBECError, ValueError):
    """Invalid problem or solver configuration."""


class DimensionError(SpinBECError, ValueError):
    """Array shape does not match the grid or spin multiplicity."""


class NumericalError(SpinBECError, ArithmeticError):
    """Non-finite value or failed numerical sub-step."""


class ManifoldDegeneracyError(NumericalError):
    """The constraint Jacobian ``(u, Gamma u)`` is (numerically) rank deficient."""


class RetractionDomainError(NumericalError):
    """Point lies outside the domain where a retraction is defined."""


class StepTooLargeError(RetractionDomainError):
    """Closed-form retraction undefined at ``u + xi``; the caller should shrink the step."""


class RootFindingError(NumericalError):
    """Scalar root solver did not converge."""


class StagnationError(NumericalError):
    """Line search failed to find an acceptable step.

    Attributes
    ----------
    best : object
        Best iterate found before the failure (solver specific payload).
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
