import logging
import math
from typing import Callable

from norm_approx.core.errors import NormDomainError

_logger = logging.getLogger(__name__)

# Published default seed; fresh checkouts reproduce the committed tables.
DEFAULT_SEED = 20090213


class _LogWrap:
    def __init__(self, fn: Callable[[], str]) -> None:
        self._fn = fn

    def __str__(self) -> str:
        return self._fn()


def _check_dimension(n: int, minimum: int = 2) -> None:
    if int(n) != n or n < minimum:
        raise NormDomainError(
            f"dimension must be an integer >= {minimum}, got {n}"
        )


def _check_epsilon(epsilon: float) -> None:
    if not 0.0 < epsilon < 1.0:
        raise NormDomainError(f"epsilon must lie in (0, 1), got {epsilon}")


def ulps_close(a: float, b: float, ulps: int = 4) -> bool:
    """True when `a` and `b` are within `ulps` units in the last place of
    the larger magnitude."""
    if a == b:
        return True
    scale = max(abs(a), abs(b))
    return abs(a - b) <= ulps * math.ulp(scale)
