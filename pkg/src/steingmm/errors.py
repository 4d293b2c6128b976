"""Exception types shared across the package."""


class EstimationError(Exception):
    """Base class for every error raised by steingmm."""


class DomainError(EstimationError, ValueError):
    pass


class EmptyInput(EstimationError, ValueError):
    pass


class SupportError(EstimationError, ValueError):
    """An observation lies outside the open support of the model."""


class DimensionMismatch(EstimationError, ValueError):
    pass


class EmptyBasis(EstimationError, ValueError):
    pass


class NonPositiveData(EstimationError, ValueError):
    pass


class DegenerateProblem(EstimationError, ArithmeticError):
    """The estimating equations have no usable solution, even after ridge repair."""


class SingularSystem(DegenerateProblem):
    """Pivoting detected rank deficiency; retry with a positive ridge."""
