"""Exception hierarchy shared by all modules."""


class ApproxError(Exception):
    """Base class for every error raised by :mod:`polyapprox`."""


class InvalidDimensionError(ApproxError, ValueError):
    pass


class DimensionMismatchError(ApproxError, ValueError):
    pass


class InvalidScaleError(ApproxError, ValueError):
    pass


class IllConditionedBasisError(ApproxError, ArithmeticError):
    """Quadrature inner product is (numerically) rank deficient on the basis."""


class DegenerateDomainError(ApproxError):
    """Rejection sampling accepted no points."""


class NotStarShapedError(ApproxError):
    """No ball was found with respect to which the domain is star-shaped."""


class InsufficientSmoothnessError(ApproxError):
    """A derivative beyond the field's tabulated order was requested."""


class OutOfDomainError(ApproxError):
    pass


class EmptyQuadratureError(ApproxError):
    pass


class HypothesisViolatedError(ApproxError):
    """A functional fails to annihilate the polynomial space it must vanish on."""
