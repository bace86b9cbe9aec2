"""Uniform sampling on the unit sphere and the empirical error estimators.

Points are drawn with Muller's method: n independent standard Gaussians
divided by their Euclidean norm. Since every sample lies on the unit
sphere, the relative error of an approximation ``D`` at ``x`` is measured
as ``|D(x) - 1|`` against exactly 1.0.

Estimates stream over batches, keeping only a running sum, a running sum
of squares and a running maximum, so memory stays ``O(batch_size)``
whatever the sample size.
"""
import math
from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from norm_approx.core.datastructures.params import NormFamily, NormParams
from norm_approx.core.datastructures.reports import ErrorReport, SamplerConfig
from norm_approx.core.errors import DimensionMismatchError, NormDomainError
from norm_approx.core.norms import P_INF, norm_p_batch, norm_weighted_batch
from norm_approx.core.optimal_params import (
    exact_norm_mre,
    mre_lambda_optimal,
    sup_relative_error,
    weight_profile_of,
)
from norm_approx.core.streams import (
    run_workers,
    split_count,
    worker_generators,
)
from norm_approx.core.utils import _logger, _LogWrap

# Gaussian vectors shorter than this are redrawn before normalisation.
MIN_GAUSSIAN_NORM = 1e-100

DEFAULT_TOL = 1e-4

# Convergence is not declared on samples smaller than this.
DEFAULT_CHECK_FROM = 1 << 20

# Consecutive stable step pairs needed before the loop stops.
DEFAULT_PATIENCE = 2

DEFAULT_FIXED_COUNT = 100_000

Evaluator = Callable[[NDArray[np.float64]], NDArray[np.float64]]


class SphereSampler:
    """Deterministic source of uniform points on the unit sphere.

    Each worker owns a generator spawned from ``cfg.seed``; successive
    calls to `draw` continue the same streams, which is what makes nested
    samples possible.
    """

    def __init__(self, cfg: SamplerConfig) -> None:
        self.cfg = cfg
        self._generators = worker_generators(cfg.seed, cfg.workers)

    def _gaussians(
        self, rng: np.random.Generator, rows: int
    ) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
        X = rng.standard_normal((rows, self.cfg.n))
        norms = norm_p_batch(X, 2.0)
        short = np.flatnonzero(norms < MIN_GAUSSIAN_NORM)
        while short.size:
            _logger.debug("redrawing %d near-zero vectors", short.size)
            X[short] = rng.standard_normal((short.size, self.cfg.n))
            norms[short] = norm_p_batch(X[short], 2.0)
            short = short[norms[short] < MIN_GAUSSIAN_NORM]
        return X, norms

    def draw(
        self, worker: int, count: int, normalize: bool = True
    ) -> Iterator[Tuple[NDArray[np.float64], NDArray[np.float64]]]:
        """Yields ``(points, gaussian_norms)`` blocks totalling `count`
        rows from the stream of `worker`.

        With ``normalize=False`` the raw Gaussian vectors are returned
        instead of their projections on the sphere.
        """
        rng = self._generators[worker]
        remaining = count
        while remaining > 0:
            rows = min(self.cfg.batch_size, remaining)
            X, norms = self._gaussians(rng, rows)
            if normalize:
                X = X / norms[:, np.newaxis]
            yield X, norms
            remaining -= rows


def sample_sphere(cfg: SamplerConfig, count: int) -> NDArray[np.float64]:
    """`count` uniform points on the unit sphere in R^n.

    Returns
    -------
    points: NDArray
        A ``(count, n)`` array whose rows have unit Euclidean norm. With
        several workers the blocks of worker 0, 1, ... are stacked in
        order, so the result only depends on (cfg, count).

    Raises
    ------
    NormDomainError
        If count < 1.
    """
    if count < 1:
        raise NormDomainError(f"count must be positive, got {count}")
    sampler = SphereSampler(cfg)
    blocks = [
        X
        for worker, part in enumerate(split_count(count, cfg.workers))
        for X, _ in sampler.draw(worker, part)
    ]
    return np.concatenate(blocks, axis=0)


def standard_error(values: Sequence[float]) -> float:
    """Standard error of the mean of `values`."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size < 2:
        return 0.0
    return float(np.std(arr, ddof=1) / math.sqrt(arr.size))


@dataclass
class _ErrorSums:
    count: int = 0
    total: float = 0.0
    total_sq: float = 0.0
    worst: float = 0.0

    def add(self, errors: NDArray[np.float64]) -> None:
        self.count += int(errors.size)
        self.total += float(errors.sum())
        self.total_sq += float(errors @ errors)
        self.worst = max(self.worst, float(errors.max()))

    @staticmethod
    def merged(parts: Sequence["_ErrorSums"]) -> "_ErrorSums":
        out = _ErrorSums()
        for part in parts:
            out.count += part.count
            out.total += part.total
            out.total_sq += part.total_sq
            out.worst = max(out.worst, part.worst)
        return out

    @property
    def are(self) -> float:
        return self.total / self.count

    @property
    def stderr(self) -> float:
        if self.count < 2:
            return 0.0
        mean = self.are
        var = (self.total_sq - self.count * mean * mean) / (self.count - 1)
        return math.sqrt(max(var, 0.0) / self.count)


def evaluator_for(params: NormParams) -> Evaluator:
    """Row-wise evaluator of the norm described by `params`."""
    if params.family == NormFamily.EUCLIDEAN:
        return lambda X: norm_p_batch(X, 2.0)
    profile = weight_profile_of(params)
    return lambda X: norm_weighted_batch(X, profile)


def _check_config(params: NormParams, cfg: SamplerConfig) -> None:
    if params.n != cfg.n:
        raise DimensionMismatchError(
            f"parameters for n={params.n} used with a sampler for n={cfg.n}"
        )


class _ErrorStream:
    """Per-worker error sums over a growing nested sample."""

    def __init__(
        self,
        params: NormParams,
        cfg: SamplerConfig,
        raw_gaussian: bool = False,
    ) -> None:
        _check_config(params, cfg)
        self.cfg = cfg
        self.raw_gaussian = raw_gaussian
        self._sampler = SphereSampler(cfg)
        self._evaluate = evaluator_for(params)
        self._sums = [_ErrorSums() for _ in range(cfg.workers)]

    def _extend_worker(self, worker: int, count: int) -> None:
        sums = self._sums[worker]
        normalize = not self.raw_gaussian
        for X, norms in self._sampler.draw(worker, count, normalize):
            values = self._evaluate(X)
            if self.raw_gaussian:
                errors = np.abs(values / norms - 1.0)
            else:
                errors = np.abs(values - 1.0)
            sums.add(errors)

    def extend(self, count: int) -> _ErrorSums:
        """Draws `count` more points and returns the merged sums."""
        parts = split_count(count, self.cfg.workers)
        run_workers(
            [
                (lambda w=w, c=c: self._extend_worker(w, c))
                for w, c in enumerate(parts)
                if c > 0
            ],
            self.cfg.workers,
        )
        return _ErrorSums.merged(self._sums)


def empirical_errors(
    params: NormParams, cfg: SamplerConfig, count: int
) -> Tuple[float, float]:
    """ARE and empirical MRE of `params` over `count` sphere samples.

    Returns
    -------
    are: float
        Mean of ``|D(x) - 1|``.
    mre_e: float
        Maximum of ``|D(x) - 1|``.

    Raises
    ------
    DimensionMismatchError
        If ``params.n != cfg.n``.
    NormDomainError
        If count < 1.
    """
    if count < 1:
        raise NormDomainError(f"count must be positive, got {count}")
    sums = _ErrorStream(params, cfg).extend(count)
    return sums.are, sums.worst


def mre_theoretical(params: NormParams) -> Optional[float]:
    """Analytical maximum relative error of the approximation, or None
    for the least-squares family which has no closed form.

    The single-parameter and two-parameter Rhodes families use their
    closed forms in terms of the stored parameters; Barni uses
    ``1 - delta``; Chaudhuri's choice uses the exact supremum of its
    weight profile; the exact norms use ``sqrt(n) - 1``, 0 and
    ``1 - 1/sqrt(n)``.
    """
    family, n = params.family, params.n
    if family == NormFamily.SEOL_CHEUN_AB:
        return None
    if family == NormFamily.LAMBDA_OPTIMAL:
        return mre_lambda_optimal(params["lam"])
    if family == NormFamily.MU_LAMBDA:
        return 1.0 - 2.0 * params["lam"] * n**0.25
    if family == NormFamily.MU_LAMBDA_INFERIOR:
        return 1.0 - params["lam"]
    if family == NormFamily.BARNI:
        return 1.0 - params["delta"]
    if family == NormFamily.CHAUDHURI_ORIGINAL:
        return sup_relative_error(weight_profile_of(params))
    if family == NormFamily.MANHATTAN:
        return exact_norm_mre(1.0, n)
    if family == NormFamily.EUCLIDEAN:
        return exact_norm_mre(2.0, n)
    assert family == NormFamily.CHESSBOARD
    return exact_norm_mre(P_INF, n)


def _check_schedule(
    schedule: Sequence[int], tol: float, check_from: int, patience: int
) -> None:
    if not schedule:
        raise NormDomainError("schedule must not be empty")
    if schedule[0] < 1:
        raise NormDomainError("schedule sizes must be positive")
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise NormDomainError(f"schedule must increase strictly: {schedule}")
    if not tol > 0.0:
        raise NormDomainError(f"tolerance must be positive, got {tol}")
    if check_from < 0:
        raise NormDomainError(f"check_from must be >= 0, got {check_from}")
    if patience < 1:
        raise NormDomainError(f"patience must be >= 1, got {patience}")


def mre_settled(
    prev: float, cur: float, tol: float, mre_t: Optional[float]
) -> bool:
    """Whether a running maximum that went from `prev` to `cur` counts
    as settled.

    A maximum that did not move carries no information unless it already
    sits within `tol` of the analytic bound `mre_t`.
    """
    if cur != prev:
        return cur - prev <= tol
    return mre_t is not None and mre_t - cur <= tol


def converged_errors(
    params: NormParams,
    cfg: SamplerConfig,
    schedule: Sequence[int],
    tol: float = DEFAULT_TOL,
    check_from: int = DEFAULT_CHECK_FROM,
    patience: int = DEFAULT_PATIENCE,
) -> ErrorReport:
    """Iterative estimate of ARE and MRE_e over a growing nested sample.

    At every schedule size the sample of the previous step is extended,
    never redrawn, so MRE_e cannot decrease from one step to the next.

    A step is stable when ARE moved by at most `tol` and MRE_e settled:
    it grew by a positive amount no larger than `tol`, or it did not
    move and lies within `tol` of the analytic MRE. The loop stops after
    `patience` consecutive stable steps, but never before `check_from`
    samples were drawn.

    Parameters
    ----------
    params: NormParams
        The approximation to measure.
    cfg: SamplerConfig
        Sampler settings; ``cfg.n`` must equal ``params.n``.
    schedule: sequence of int
        Strictly increasing cumulative sample sizes.
    tol: float
        Convergence tolerance on both statistics.
    check_from: int
        Smallest sample size at which convergence may be declared.
    patience: int
        Number of consecutive stable steps required.

    Returns
    -------
    report: ErrorReport
        Errors of the last evaluated step. ``converged`` is False when the
        schedule ran out first, in particular for a single-step schedule.
    """
    _check_schedule(schedule, tol, check_from, patience)
    stream = _ErrorStream(params, cfg)
    mre_t = mre_theoretical(params)
    history: List[Tuple[int, float, float]] = []
    used = 0
    streak = 0
    converged = False
    sums = _ErrorSums()
    for target in schedule:
        sums = stream.extend(target - used)
        used = target
        history.append((used, sums.are, sums.worst))
        _logger.debug(
            "%s n=%d samples=%d are=%.6f mre_e=%.6f",
            params.family.value,
            params.n,
            used,
            sums.are,
            sums.worst,
        )
        if len(history) < 2:
            continue
        _, prev_are, prev_mre = history[-2]
        stable = abs(sums.are - prev_are) <= tol and mre_settled(
            prev_mre, sums.worst, tol, mre_t
        )
        streak = streak + 1 if stable else 0
        if streak >= patience and used >= check_from:
            converged = True
            break
    if not converged:
        _logger.debug(
            "no convergence for %s n=%d: %s",
            params.family.value,
            params.n,
            _LogWrap(lambda: str(history)),
        )
    return ErrorReport(
        family=params.family,
        n=params.n,
        are=sums.are,
        mre_e=sums.worst,
        mre_t=mre_t,
        samples_used=used,
        converged=converged,
        convergence_tol=tol,
        seed=cfg.seed,
        are_stderr=sums.stderr,
        history=tuple(history),
    )


def fixed_sample_mre(
    params: NormParams,
    cfg: SamplerConfig,
    count: int = DEFAULT_FIXED_COUNT,
    raw_gaussian: bool = False,
) -> Tuple[float, float]:
    """ARE and MRE_e over a single fixed-size sample, without any
    convergence loop.

    With ``raw_gaussian=True`` the Gaussian vectors are not normalised and
    the error is ``|D(x) / D_2(x) - 1|``; both protocols estimate the same
    quantities since every norm is homogeneous.
    """
    if count < 1:
        raise NormDomainError(f"count must be positive, got {count}")
    sums = _ErrorStream(params, cfg, raw_gaussian=raw_gaussian).extend(count)
    return sums.are, sums.worst


def default_schedule(lo: int = 16, hi: int = 24) -> Tuple[int, ...]:
    """``(2^lo, 2^(lo+1), ..., 2^hi)``."""
    if not 0 <= lo <= hi:
        raise NormDomainError(f"invalid schedule exponents {lo}..{hi}")
    return tuple(1 << k for k in range(lo, hi + 1))


def full_schedule() -> Tuple[int, ...]:
    """The full-scale schedule ``2^20, ..., 2^31, 2^32 - 1``."""
    return default_schedule(20, 31) + ((1 << 32) - 1,)
