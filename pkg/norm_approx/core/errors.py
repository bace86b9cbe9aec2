class NormApproxError(Exception):
    """Base class for every error raised by norm_approx."""


class NormDomainError(NormApproxError, ValueError):
    """An argument lies outside the domain of the operation, e.g. p < 1,
    n < 2, epsilon outside (0, 1) or a zero vector where a relative error
    is requested."""


class DimensionMismatchError(NormApproxError, ValueError):
    """Two objects that must share a dimension do not."""


class InvalidParameterError(NormApproxError, ValueError):
    """Approximation parameters violate the invariants of their family,
    e.g. a weight profile that does not induce a norm."""


class NumericalError(NormApproxError, ArithmeticError):
    """A numerical procedure could not produce a trustworthy result."""
