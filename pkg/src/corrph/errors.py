"""Exception hierarchy shared by all modules."""


class CorrPHError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(CorrPHError, ValueError):
    """An input object violates its invariants."""


class DomainError(CorrPHError, ValueError):
    """An argument lies outside the domain of the operation."""


class StabilityError(CorrPHError, ValueError):
    """The load of a risk model is not strictly below one."""


class ParameterError(CorrPHError, ValueError):
    """A model parameter makes a closed form degenerate."""


class RepresentationSizeError(CorrPHError):
    """A phase-type representation would exceed the phase cap."""


class UnsupportedError(CorrPHError, NotImplementedError):
    """The requested operation is not available for this input."""


class ConvergenceError(CorrPHError, ArithmeticError):
    """An iterative method failed to reach its tolerance."""


class NumericError(CorrPHError, ArithmeticError):
    """A numerical consistency check failed.

    ``estimate`` carries the best value obtained before the failure, when
    there is one.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class ConditionError(CorrPHError, ValueError):
    """A convergence or applicability condition of an expansion fails."""
