"""How many uniform samples it takes to cover the unit sphere.

The sphere in R^n is covered by patches of radius epsilon, each about the
size of an (n-1)-ball. With ``N`` patches the coupon collector argument
puts the expected number of uniform samples needed to hit every patch at
``N ln N``, which grows like ``epsilon^-(n-1)`` and quickly exceeds any
fixed sampling budget.

Volumes are computed from ``log Gamma`` so that the high-dimensional cases
neither overflow nor underflow.
"""
import math
from typing import Dict, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy.special import digamma, gamma, gammaln

from norm_approx.core.datastructures.reports import CoverageEstimate
from norm_approx.core.errors import NormDomainError
from norm_approx.core.streams import (
    run_workers,
    split_count,
    worker_generators,
)
from norm_approx.core.utils import (
    DEFAULT_SEED,
    _check_dimension,
    _check_epsilon,
    _logger,
)

# Above this dimension volumes go through their logarithms.
LINEAR_MAX_N = 50

# ln(1e300): beyond it only log-domain values are reported.
LOG_DOMAIN_THRESHOLD = math.log(1e300)

_LOG_MAX_FLOAT = math.log(np.finfo(np.float64).max)

# Geometric draws materialised at once by the coupon simulator.
_COUPON_BLOCK = 1 << 22

DEFAULT_QUANTILES = (0.5, 0.9, 0.99)


def _exp(x: float) -> float:
    return math.exp(x) if x < _LOG_MAX_FLOAT else math.inf


def _check_radius(r: float) -> None:
    if not r > 0.0:
        raise NormDomainError(f"radius must be positive, got {r}")


def log_ball_volume(n: int, r: float = 1.0) -> float:
    """``ln V_n(r)`` with ``V_n(r) = pi^(n/2) / Gamma(n/2 + 1) r^n``."""
    _check_dimension(n, minimum=1)
    _check_radius(r)
    return (
        0.5 * n * math.log(math.pi)
        - float(gammaln(0.5 * n + 1.0))
        + n * math.log(r)
    )


def ball_volume(n: int, r: float = 1.0) -> float:
    """Volume of the n-ball of radius r.

    Evaluated directly up to `LINEAR_MAX_N` and through `log_ball_volume`
    above it.

    Raises
    ------
    NormDomainError
        If n < 1 or r <= 0.
    """
    if n > LINEAR_MAX_N:
        return _exp(log_ball_volume(n, r))
    _check_dimension(n, minimum=1)
    _check_radius(r)
    return float(math.pi ** (0.5 * n) / gamma(0.5 * n + 1.0) * r**n)


def log_sphere_area(n: int, r: float = 1.0) -> float:
    _check_dimension(n)
    return math.log(n) + log_ball_volume(n, 1.0) + (n - 1) * math.log(r)


def sphere_area(n: int, r: float = 1.0) -> float:
    """Surface area of the sphere of radius r in R^n, the derivative of
    `ball_volume` in r: ``n V_n(1) r^(n-1)``."""
    if n > LINEAR_MAX_N:
        return _exp(log_sphere_area(n, r))
    _check_dimension(n)
    _check_radius(r)
    return n * ball_volume(n, 1.0) * r ** (n - 1)


def log_patch_count(n: int, epsilon: float) -> Tuple[float, float]:
    """Natural logarithms of the exact and approximate patch counts."""
    _check_dimension(n)
    _check_epsilon(epsilon)
    exact = log_sphere_area(n, 1.0) - log_ball_volume(n - 1, epsilon)
    approx = (
        math.log(n) + 0.5 * math.log(math.pi) - (n - 1) * math.log(epsilon)
    )
    return exact, approx


def patch_count(n: int, epsilon: float) -> Tuple[float, float]:
    """Number of epsilon-patches needed to cover the unit sphere in R^n.

    Returns
    -------
    exact: float
        ``A_(n-1)(1) / V_(n-1)(epsilon)``, the sphere area over the volume
        of one flat patch.
    approx: float
        ``n sqrt(pi) / epsilon^(n-1)``, the order term.

    Up to `LINEAR_MAX_N` both are evaluated directly, above it through
    `log_patch_count`; there they are ``math.inf`` once they exceed the
    double range.
    """
    if n > LINEAR_MAX_N:
        exact, approx = log_patch_count(n, epsilon)
        return _exp(exact), _exp(approx)
    _check_dimension(n)
    _check_epsilon(epsilon)
    exact_linear = sphere_area(n, 1.0) / ball_volume(n - 1, epsilon)
    approx_linear = n * math.sqrt(math.pi) / epsilon ** (n - 1)
    return exact_linear, approx_linear


def expected_samples(n: int, epsilon: float) -> CoverageEstimate:
    """Coupon collector estimate ``N ln N`` of the number of uniform
    samples needed to hit every epsilon-patch, with ``N`` the exact patch
    count.

    When ``N <= 1`` the estimate degenerates to a single sample.
    """
    log_exact, log_approx = log_patch_count(n, epsilon)
    if log_exact <= 0.0:
        log_expected = 0.0
    else:
        log_expected = log_exact + math.log(log_exact)
    log_domain = log_expected > LOG_DOMAIN_THRESHOLD
    estimate = CoverageEstimate(
        n=n,
        epsilon=epsilon,
        patch_count_exact=_exp(log_exact),
        patch_count_approx=_exp(log_approx),
        expected_samples=_exp(log_expected),
        log10_expected_samples=log_expected / math.log(10.0),
        log_domain=log_domain,
        log_patch_count=log_exact,
    )
    _logger.debug("coverage estimate %s", estimate)
    return estimate


def tail_threshold(c: float, s: float) -> float:
    """``c ln c + s c``, the draw count the tail bound is stated for."""
    return c * math.log(c) + s * c


def tail_bound(c: float, s: float) -> Tuple[float, float]:
    """Probability that collecting all `c` coupons takes more than
    ``c ln c + s c`` draws.

    Returns
    -------
    union: float
        The union bound ``e^-s``, valid for every c.
    limit: float
        The large-c limit ``1 - exp(-e^-s)``, never above the union
        bound; the two only round to the same float once ``e^-s`` is
        below about 1e-15.

    Raises
    ------
    NormDomainError
        If c <= 1 or s <= 0.
    """
    if not c > 1.0:
        raise NormDomainError(f"need more than one coupon, got c={c}")
    if not s > 0.0:
        raise NormDomainError(f"s must be positive, got {s}")
    union = math.exp(-s)
    limit = -math.expm1(-union)
    # union - limit is about union**2 / 2, lost to rounding for tiny union
    assert limit < union or (limit == union and union < 2.0**-50)
    return union, limit


def harmonic_number(c: int) -> float:
    """``H_c = 1 + 1/2 + ... + 1/c``."""
    if c < 1:
        raise NormDomainError(f"harmonic number needs c >= 1, got {c}")
    return float(digamma(c + 1.0) + np.euler_gamma)


def coupon_expectation(c: int) -> float:
    """Expected number of draws to collect all `c` coupons, ``c H_c``."""
    return c * harmonic_number(c)


def _coupon_draws(
    rng: np.random.Generator, c: int, trials: int
) -> NDArray[np.int64]:
    # after i distinct coupons the wait for a new one is geometric with
    # success probability (c - i) / c
    p = (c - np.arange(c, dtype=np.float64)) / c
    rows = max(1, _COUPON_BLOCK // c)
    out = np.empty(trials, dtype=np.int64)
    done = 0
    while done < trials:
        block = min(rows, trials - done)
        waits = rng.geometric(p, size=(block, c))
        out[done:done + block] = waits.sum(axis=1)
        done += block
    return out


def coupon_draws(
    c: int, trials: int, seed: int = DEFAULT_SEED, workers: int = 1
) -> NDArray[np.int64]:
    """Number of uniform draws each of `trials` simulated collectors needed
    to see all `c` equiprobable cells.

    Trials are split over `workers` independent streams and concatenated
    in worker order.

    Raises
    ------
    NormDomainError
        If c < 2 or trials < 1.
    """
    if c < 2:
        raise NormDomainError(f"need at least two cells, got c={c}")
    if trials < 1:
        raise NormDomainError(f"trials must be positive, got {trials}")
    gens = worker_generators(seed, workers)
    parts = run_workers(
        [
            (lambda g=g, t=t: _coupon_draws(g, c, t))
            for g, t in zip(gens, split_count(trials, workers))
        ],
        workers,
    )
    return np.concatenate(parts)


def coupon_simulate(
    c: int,
    trials: int,
    seed: int = DEFAULT_SEED,
    quantiles: Sequence[float] = DEFAULT_QUANTILES,
    workers: int = 1,
) -> Tuple[float, Dict[float, float]]:
    """Simulates the coupon collector with `c` cells.

    Returns
    -------
    mean_draws: float
        Average number of draws until every cell was seen.
    quantiles: Dict[float, float]
        Requested empirical quantiles of the draw count.
    """
    draws = coupon_draws(c, trials, seed, workers)
    qs = {float(q): float(np.quantile(draws, q)) for q in quantiles}
    return float(draws.mean()), qs


def coverage_deficiency(n: int, epsilon: float, budget: float) -> float:
    """``budget / expected_samples(n, epsilon)``; below 1 the budget cannot
    be expected to place a sample in every epsilon-patch.

    The ratio is formed from logarithms and clamped to the double range.
    """
    if not budget >= 1:
        raise NormDomainError(f"budget must be at least 1, got {budget}")
    estimate = expected_samples(n, epsilon)
    log_expected = estimate.log10_expected_samples * math.log(10.0)
    return _exp(math.log(budget) - log_expected)
