import math
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np
from numpy.typing import NDArray

from norm_approx.core.errors import InvalidParameterError, NormDomainError

# Cost rows a profile can be evaluated with.
SHAPE_SUM = "sum"
SHAPE_MAX = "max"
SHAPE_LAMBDA = "lambda"
SHAPE_TWO_WEIGHT = "two_weight"
SHAPE_FULL = "full"


@dataclass(frozen=True)
class VectorN:
    """An n-dimensional real vector, the argument of every norm.

    Attributes
    ----------
    coords: Tuple[float, ...]
        The coordinates. Every coordinate is finite and there is at least
        one of them.
    """

    coords: Tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.coords) < 1:
            raise NormDomainError("a vector needs at least one coordinate")
        for c in self.coords:
            if not math.isfinite(c):
                raise NormDomainError(f"non-finite coordinate {c!r}")

    @staticmethod
    def of(values: Iterable[float]) -> "VectorN":
        """Builds a VectorN from any iterable of reals.

        Parameters
        ----------
        values: Iterable[float]
            The coordinates.

        Returns
        -------
        vector: VectorN
            The validated vector.
        """
        return VectorN(tuple(float(v) for v in values))

    @property
    def n(self) -> int:
        """The dimension of the vector."""
        return len(self.coords)

    @property
    def is_zero(self) -> bool:
        return all(c == 0.0 for c in self.coords)

    def as_array(self) -> NDArray[np.float64]:
        return np.asarray(self.coords, dtype=np.float64)

    def scaled(self, c: float) -> "VectorN":
        return VectorN(tuple(c * v for v in self.coords))


@dataclass(frozen=True)
class WeightProfile:
    """Per-rank weights of a weighted sorted city-block norm.

    The approximation evaluated with a profile is ``sum(w[i] * x_(i))``
    where ``x_(1) >= x_(2) >= ... >= x_(n)`` are the absolute coordinates
    of the argument sorted in descending order.

    Attributes
    ----------
    weights: Tuple[float, ...]
        One weight per rank, ``w[0]`` applies to the largest absolute
        coordinate.
    norm_inducing: bool
        When True (the default) the profile must satisfy
        ``w[0] >= w[1] >= ... >= w[n-1] > 0``, which is necessary and
        sufficient for the evaluated function to be a norm. When False
        only non-negativity is required; this admits degenerate profiles
        such as ``(1, 0, ..., 0)`` which reproduces the chessboard norm.
    """

    weights: Tuple[float, ...]

    norm_inducing: bool = True

    def __post_init__(self) -> None:
        if len(self.weights) < 1:
            raise InvalidParameterError("a weight profile needs a weight")
        for w in self.weights:
            if not math.isfinite(w):
                raise InvalidParameterError(f"non-finite weight {w!r}")
        if self.norm_inducing:
            if any(w <= 0.0 for w in self.weights):
                raise InvalidParameterError(
                    f"norm-inducing weights must be positive: {self.weights}"
                )
            for a, b in zip(self.weights, self.weights[1:]):
                if b > a:
                    raise InvalidParameterError(
                        "norm-inducing weights must be non-increasing: "
                        f"{self.weights}"
                    )
        elif any(w < 0.0 for w in self.weights):
            raise InvalidParameterError(
                f"weights must be non-negative: {self.weights}"
            )

    @staticmethod
    def of(
        values: Iterable[float], norm_inducing: bool = True
    ) -> "WeightProfile":
        return WeightProfile(
            tuple(float(v) for v in values), norm_inducing=norm_inducing
        )

    @staticmethod
    def two_weight(first: float, rest: float, n: int) -> "WeightProfile":
        """Profile ``(first, rest, ..., rest)`` of length `n`; the form
        shared by the Chaudhuri, Rhodes and Seol-Cheun approximations."""
        return WeightProfile((float(first),) + (float(rest),) * (n - 1))

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def shape(self) -> str:
        """The cost row this profile can be evaluated with.

        Returns
        -------
        shape: str
            ``"sum"`` for all-ones (city-block), ``"max"`` for ``(1, 0, ...)``
            (chessboard), ``"lambda"`` for ``(1, l, ..., l)``,
            ``"two_weight"`` for ``(m, l, ..., l)`` and ``"full"`` for
            anything else.
        """
        head, rest = self.weights[0], self.weights[1:]
        if all(w == 1.0 for w in self.weights):
            return SHAPE_SUM
        if not rest:
            return SHAPE_FULL
        if all(w == rest[0] for w in rest):
            if head == 1.0:
                return SHAPE_MAX if rest[0] == 0.0 else SHAPE_LAMBDA
            return SHAPE_TWO_WEIGHT
        return SHAPE_FULL

    def as_array(self) -> NDArray[np.float64]:
        return np.asarray(self.weights, dtype=np.float64)


@dataclass(frozen=True)
class OpCount:
    """Primitive operations performed by one norm evaluation.

    Attributes
    ----------
    abs_ops: int
        Absolute values taken.
    comparisons: int
        Comparisons between coordinates.
    additions: int
        Additions (and subtractions).
    multiplications: int
        Multiplications.
    square_roots: int
        Square roots.
    """

    abs_ops: int = 0
    comparisons: int = 0
    additions: int = 0
    multiplications: int = 0
    square_roots: int = 0

    def __post_init__(self) -> None:
        assert min(self.as_tuple()) >= 0

    def __add__(self, other: "OpCount") -> "OpCount":
        pairs = zip(self.as_tuple(), other.as_tuple())
        return OpCount(*(a + b for a, b in pairs))

    def as_tuple(self) -> Tuple[int, int, int, int, int]:
        return (
            self.abs_ops,
            self.comparisons,
            self.additions,
            self.multiplications,
            self.square_roots,
        )
