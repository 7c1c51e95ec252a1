"""Exception taxonomy for spsregion.

Every error raised on a user-reachable path derives from SpsRegionError so
callers (and the CLI) can catch one base class.
"""


class SpsRegionError(Exception):
    """Base class for all spsregion errors."""


class NonPositiveLambda(SpsRegionError):
    """Ridge parameter must be strictly positive for the extended problem."""


class DimensionMismatch(SpsRegionError):
    """Array shapes disagree with the declared (n, d)."""


class SingularSystem(SpsRegionError):
    """A linear solve failed numerically."""


class SingularGram(SpsRegionError):
    """The raw Gram matrix is not invertible within tolerance."""


class IrrationalConfidence(SpsRegionError):
    """Confidence level admits no small-denominator rational form."""


class IndexOutOfRange(SpsRegionError):
    """Perturbation index outside [0, m-1]."""


class NumericalFailure(SpsRegionError):
    """An eigendecomposition or factorization did not converge."""


class InfiniteRegion(SpsRegionError):
    """Geometry requested for an unbounded region."""


class RankDeficient(SpsRegionError):
    """Matrix has (numerically) deficient column rank."""


class DomainError(SpsRegionError):
    """Scalar argument outside its valid domain."""


class SampleTooSmall(SpsRegionError):
    """Sample size below the minimum the size bound requires."""

    def __init__(self, message, required_n=None):
        super().__init__(message)
        self.required_n = required_n
