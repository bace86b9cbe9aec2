"""Optimal parameters and analytical maximum relative errors of the
Euclidean norm approximations, as functions of the dimension n.

All approximations are weighted sorted city-block norms; the families
differ in how the weights are chosen:

- Chaudhuri's original ``lam = 1/(n - floor((n-2)/2))``,
- Rhodes' minimax single parameter, found as a root of a quartic,
- Rhodes' two-parameter family and its ``mu = 0`` variant,
- Barni's rank weights ``sqrt(i) - sqrt(i-1)`` with a global scale,
- Seol and Cheun's least-squares fit of ``a D_inf + b D_1`` to ``D_2``.
"""
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from norm_approx.core.datastructures.params import NormFamily, NormParams
from norm_approx.core.datastructures.vectors import WeightProfile
from norm_approx.core.errors import (
    InvalidParameterError,
    NormDomainError,
    NumericalError,
)
from norm_approx.core.norms import P_INF, PValue, norm_p_batch
from norm_approx.core.quartic import bisect, solve_quartic
from norm_approx.core.streams import (
    DEFAULT_BATCH_SIZE,
    gaussian_batches,
    run_workers,
    split_count,
    worker_generators,
)
from norm_approx.core.utils import (
    DEFAULT_SEED,
    _check_dimension,
    _logger,
    _LogWrap,
)

# Residual the single-parameter root must meet on the unsquared equation.
RESIDUAL_TOL = 1e-10

DEFAULT_FIT_SAMPLES = 10**6

MIN_FIT_SAMPLES = 1000


# --------------------------------------------------------------------------
# Chaudhuri et al.


def chaudhuri_lambda(n: int) -> float:
    """``1 / (n - floor((n - 2) / 2))``.

    Raises
    ------
    NormDomainError
        If n < 2.
    """
    _check_dimension(n)
    return 1.0 / (n - (n - 2) // 2)


def chaudhuri_bracket(n: int, lam: float) -> Tuple[float, float]:
    """Large-n bracket ``1 - (1 - lam (n-1)) / sqrt(n) <= eps <= 1 - lam``,
    evaluated literally for an explicit `lam`."""
    _check_dimension(n)
    return 1.0 - (1.0 - lam * (n - 1)) / math.sqrt(n), 1.0 - lam


@dataclass(frozen=True)
class ChaudhuriMRE:
    """Maximum relative error statements for Chaudhuri's choice of lam.

    Attributes
    ----------
    lower, upper: float
        The large-n bracket, stated for n >= 3.
    exact_small_n: Optional[float]
        The even/odd overestimation formula; None when the norm
        underestimates by more than it overestimates, which is the
        large-n regime where only the bracket applies.
    overestimate: float
        The even/odd formula regardless of regime.
    """

    lower: float
    upper: float
    exact_small_n: Optional[float]
    overestimate: float


def mre_chaudhuri_original(n: int) -> ChaudhuriMRE:
    _check_dimension(n)
    lam = chaudhuri_lambda(n)
    shift = 2 if n % 2 == 0 else 3
    over = math.sqrt(1.0 + 4.0 * (n - 1) / (n + shift) ** 2) - 1.0
    lower, upper = chaudhuri_bracket(n, lam)
    profile = WeightProfile.two_weight(1.0, lam, n)
    under = underestimation_error(profile)
    return ChaudhuriMRE(
        lower=lower,
        upper=upper,
        exact_small_n=over if over >= under else None,
        overestimate=over,
    )


# --------------------------------------------------------------------------
# Rhodes


def rhodes_residual(lam: float, n: int) -> float:
    """``1 - 2 sqrt(lam - lam^2) - (sqrt(1 + lam^2 (n-1)) - 1)``, whose
    root in (0, 1/2) is the minimax single parameter."""
    return (
        1.0
        - 2.0 * math.sqrt(lam - lam * lam)
        - (math.sqrt(1.0 + lam * lam * (n - 1)) - 1.0)
    )


def rhodes_quartic_coefficients(
    n: int,
) -> Tuple[float, float, float, float, float]:
    """Coefficients, highest degree first, of the quartic obtained by
    squaring the defining equation twice.

    With ``m = n + 3`` the first squaring gives
    ``3 + 4 lam - m lam^2 = 8 sqrt(lam - lam^2)`` and the second
    ``m^2 lam^4 - 8 m lam^3 + (80 - 6 m) lam^2 - 40 lam + 9 = 0``.
    """
    m = float(n + 3)
    return (m * m, -8.0 * m, 80.0 - 6.0 * m, -40.0, 9.0)


def solve_lambda_optimal_bisection(n: int, tol: float = 1e-14) -> float:
    """Oracle: bisection on the unsquared equation over (0, 1/2)."""
    _check_dimension(n)
    return bisect(lambda lam: rhodes_residual(lam, n), 0.0, 0.5, tol=tol)


def solve_lambda_optimal(n: int) -> float:
    """The minimax single parameter ``lam'`` for dimension n.

    The quartic is solved with Ferrari's method; squaring introduces
    spurious roots, so the smallest real root in (0, 1/2) that satisfies
    the unsquared equation to `RESIDUAL_TOL` is returned. When the
    resolvent discriminant is too close to zero to classify, bisection
    on the unsquared equation is used instead.

    Raises
    ------
    NumericalError
        If no candidate root passes the residual check.
    """
    _check_dimension(n)
    roots = solve_quartic(*rhodes_quartic_coefficients(n))
    if roots.ambiguous:
        _logger.debug(
            "n=%d: ambiguous resolvent discriminant %g, bisecting",
            n,
            roots.discriminant,
        )
        return solve_lambda_optimal_bisection(n)
    candidates = [r for r in roots.real_roots() if 0.0 < r < 0.5]
    _logger.debug(
        "n=%d: quartic candidates %s",
        n,
        _LogWrap(
            lambda: str([(r, rhodes_residual(r, n)) for r in candidates])
        ),
    )
    for lam in candidates:
        if abs(rhodes_residual(lam, n)) < RESIDUAL_TOL:
            return lam
    raise NumericalError(f"no admissible quartic root for n={n}")


def mre_lambda_optimal(lam: float) -> float:
    """``1 - 2 sqrt(lam - lam^2)``.

    Raises
    ------
    NormDomainError
        If `lam` lies outside (0, 1/2).
    """
    if not 0.0 < lam < 0.5:
        raise NormDomainError(f"lam must lie in (0, 1/2), got {lam}")
    return 1.0 - 2.0 * math.sqrt(lam - lam * lam)


def mu_lambda_optimal(n: int) -> Tuple[float, float, float]:
    """Optimal ``(mu*, lam*, mre)`` of the two-parameter family."""
    _check_dimension(n)
    root4 = n**0.25
    lam = 2.0 / (2.0 * root4 + math.sqrt(2.0 * n + 2.0 * math.sqrt(n)))
    mu = (math.sqrt(n) + 1.0) * lam
    return mu, lam, 1.0 - 2.0 * lam * root4


def mu_lambda_inferior(n: int) -> Tuple[float, float, float]:
    """``(0, lam*, 1 - lam*)`` with ``lam* = 2 / (1 + sqrt(n - 1))``.

    At n = 2 the closed form collapses to ``lam* = 1`` and a zero error,
    which is not the error of the resulting norm.
    """
    _check_dimension(n)
    lam = 2.0 / (1.0 + math.sqrt(n - 1))
    return 0.0, lam, 1.0 - lam


# --------------------------------------------------------------------------
# Barni et al.


def barni_optimal(n: int) -> Tuple[float, Tuple[float, ...], float]:
    """Optimal ``(delta*, alpha*, mre)`` with
    ``alpha_i = sqrt(i) - sqrt(i - 1)`` and
    ``delta = 2 / (1 + sqrt(sum alpha_i^2))``."""
    _check_dimension(n)
    alphas = tuple(math.sqrt(i) - math.sqrt(i - 1) for i in range(1, n + 1))
    delta = 2.0 / (1.0 + math.sqrt(math.fsum(a * a for a in alphas)))
    return delta, alphas, 1.0 - delta


# --------------------------------------------------------------------------
# Seol and Cheun


@dataclass(frozen=True)
class GaussianMoments:
    """Sums of the second moments of (D_inf, D_1, D_2) over a sample.

    Attributes
    ----------
    count: int
        Number of vectors accumulated.
    inf_inf, inf_one, one_one, two_inf, two_one, two_two: float
        Sums of D_inf^2, D_inf D_1, D_1^2, D_2 D_inf, D_2 D_1 and D_2^2.
    """

    count: int = 0
    inf_inf: float = 0.0
    inf_one: float = 0.0
    one_one: float = 0.0
    two_inf: float = 0.0
    two_one: float = 0.0
    two_two: float = 0.0

    def __add__(self, other: "GaussianMoments") -> "GaussianMoments":
        return GaussianMoments(
            count=self.count + other.count,
            inf_inf=self.inf_inf + other.inf_inf,
            inf_one=self.inf_one + other.inf_one,
            one_one=self.one_one + other.one_one,
            two_inf=self.two_inf + other.two_inf,
            two_one=self.two_one + other.two_one,
            two_two=self.two_two + other.two_two,
        )


def _gaussian_moments(
    rng: np.random.Generator, n: int, count: int
) -> GaussianMoments:
    acc = GaussianMoments()
    for X in gaussian_batches(rng, n, count, DEFAULT_BATCH_SIZE):
        d_inf = norm_p_batch(X, P_INF)
        d_one = norm_p_batch(X, 1.0)
        d_two = norm_p_batch(X, 2.0)
        acc = acc + GaussianMoments(
            count=len(X),
            inf_inf=float(d_inf @ d_inf),
            inf_one=float(d_inf @ d_one),
            one_one=float(d_one @ d_one),
            two_inf=float(d_two @ d_inf),
            two_one=float(d_two @ d_one),
            two_two=float(d_two @ d_two),
        )
    return acc


def gaussian_moments(
    n: int, sample_count: int, seed: int, workers: int = 1
) -> GaussianMoments:
    """Second-moment sums over `sample_count` standard Gaussian vectors.

    Worker results are merged in worker-index order, so the sums only
    depend on (n, sample_count, seed, workers).
    """
    gens = worker_generators(seed, workers)
    counts = split_count(sample_count, workers)
    parts = run_workers(
        [
            (lambda g=g, c=c: _gaussian_moments(g, n, c))
            for g, c in zip(gens, counts)
        ],
        workers,
    )
    total = GaussianMoments()
    for part in parts:
        total = total + part
    return total


def solve_normal_equations(moments: GaussianMoments) -> Tuple[float, float]:
    """Solves the 2x2 system for ``(a, b)`` by direct elimination.

    Raises
    ------
    NumericalError
        If the determinant is negligible relative to its terms.
    """
    s11, s12, s22 = moments.inf_inf, moments.inf_one, moments.one_one
    r1, r2 = moments.two_inf, moments.two_one
    det = s11 * s22 - s12 * s12
    if abs(det) < 1e-12 * max(abs(s11 * s22), s12 * s12):
        raise NumericalError(f"singular normal equations, det={det}")
    a = (r1 * s22 - s12 * r2) / det
    b = (s11 * r2 - s12 * r1) / det
    return a, b


def fit_seol_cheun(
    n: int,
    sample_count: int = DEFAULT_FIT_SAMPLES,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> Tuple[float, float]:
    """Least-squares ``(a, b)`` for ``a D_inf + b D_1 ~ D_2`` under
    standard Gaussian inputs.

    Raises
    ------
    NormDomainError
        If n < 2 or fewer than `MIN_FIT_SAMPLES` samples are requested.
    NumericalError
        If the normal equations are singular.
    """
    _check_dimension(n)
    if sample_count < MIN_FIT_SAMPLES:
        raise NormDomainError(
            f"fit needs at least {MIN_FIT_SAMPLES} samples, got {sample_count}"
        )
    moments = gaussian_moments(n, sample_count, seed, workers)
    a, b = solve_normal_equations(moments)
    _logger.debug("n=%d fit a=%.9f b=%.9f from %s", n, a, b, moments)
    return a, b


def seol_cheun_mse(
    n: int, a: float, b: float, sample_count: int, seed: int
) -> float:
    """Mean of ``(a D_inf + b D_1 - D_2)^2`` over a Gaussian sample."""
    m = gaussian_moments(n, sample_count, seed)
    total = (
        a * a * m.inf_inf
        + 2.0 * a * b * m.inf_one
        + b * b * m.one_one
        - 2.0 * a * m.two_inf
        - 2.0 * b * m.two_one
        + m.two_two
    )
    return total / m.count


# --------------------------------------------------------------------------
# Exact norms and profile-level error bounds


def exact_norm_mre(p: PValue, n: int) -> float:
    """Maximum relative error of an exact norm used in place of D_2:
    ``sqrt(n) - 1`` for D_1, ``1 - 1/sqrt(n)`` for D_inf, 0 for D_2."""
    _check_dimension(n, minimum=1)
    if p is P_INF or p == math.inf:
        return 1.0 - 1.0 / math.sqrt(n)
    if p == 1.0:
        return math.sqrt(n) - 1.0
    if p == 2.0:
        return 0.0
    raise NormDomainError(f"no closed form for p = {p}")


def overestimation_error(w: WeightProfile) -> float:
    """``max_x D(x) - 1`` over the unit sphere, which is ``|w|_2 - 1``
    for non-increasing non-negative weights."""
    return math.sqrt(math.fsum(x * x for x in w.weights)) - 1.0


def underestimation_error(w: WeightProfile) -> float:
    """``1 - min_x D(x)`` over the unit sphere. The minimum of a linear
    function over the sorted cone is attained on one of its extreme rays
    ``(1, ..., 1, 0, ..., 0) / sqrt(k)``."""
    best = math.inf
    partial = 0.0
    for k, wk in enumerate(w.weights, start=1):
        partial += wk
        best = min(best, partial / math.sqrt(k))
    return 1.0 - best


def sup_relative_error(w: WeightProfile) -> float:
    """Exact maximum of ``|D(x) - 1|`` over the unit sphere for a profile
    with non-increasing non-negative weights.

    Raises
    ------
    InvalidParameterError
        If the weights increase somewhere.
    """
    if any(b > a for a, b in zip(w.weights, w.weights[1:])):
        raise InvalidParameterError("weights must be non-increasing")
    return max(overestimation_error(w), underestimation_error(w))


# --------------------------------------------------------------------------
# Parameter factories


def exact_params(family: NormFamily, n: int) -> NormParams:
    if not family.is_exact:
        raise InvalidParameterError(f"{family.value} is not an exact norm")
    return NormParams(family=family, n=n)


def params_for(
    family: NormFamily,
    n: int,
    fit_samples: int = DEFAULT_FIT_SAMPLES,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> NormParams:
    """Builds the optimal `NormParams` of `family` at dimension n.

    The fit options only matter for `NormFamily.SEOL_CHEUN_AB`. The exact
    norms accept n = 1, every approximation needs n >= 2.
    """
    _check_dimension(n, minimum=1 if family.is_exact else 2)
    if family.is_exact:
        return exact_params(family, n)
    if family == NormFamily.CHAUDHURI_ORIGINAL:
        return NormParams(family, n, {"lam": chaudhuri_lambda(n)})
    if family == NormFamily.LAMBDA_OPTIMAL:
        return NormParams(family, n, {"lam": solve_lambda_optimal(n)})
    if family == NormFamily.MU_LAMBDA:
        mu, lam, _ = mu_lambda_optimal(n)
        return NormParams(family, n, {"mu": mu, "lam": lam})
    if family == NormFamily.MU_LAMBDA_INFERIOR:
        mu, lam, _ = mu_lambda_inferior(n)
        return NormParams(family, n, {"mu": mu, "lam": lam})
    if family == NormFamily.BARNI:
        delta, alphas, _ = barni_optimal(n)
        return NormParams(family, n, {"delta": delta}, alphas=alphas)
    assert family == NormFamily.SEOL_CHEUN_AB
    a, b = fit_seol_cheun(n, fit_samples, seed, workers)
    return NormParams(
        family,
        n,
        {"a": a, "b": b},
        fit_samples=fit_samples,
        seed=seed,
        workers=workers,
    )


def weight_profile_of(params: NormParams) -> WeightProfile:
    """Rank weights of the approximation described by `params`.

    ============================  ============  ==================
    family                        w_1           w_i, i > 1
    ============================  ============  ==================
    Chaudhuri / optimal lam       1             lam
    two-parameter (mu, lam)       mu            lam
    Barni                         delta         delta * alpha_i
    Seol-Cheun (a, b)             a + b         b
    ============================  ============  ==================

    The ``mu = 0`` Rhodes variant is ``max_j {-lam |x_j| + lam sum|x|}``,
    i.e. ``lam`` on every rank but the smallest, which gets 0; that
    profile is not strictly positive and is returned with
    ``norm_inducing=False``. The city-block and chessboard norms map to
    ``(1, ..., 1)`` and ``(1, 0, ..., 0)``.

    Raises
    ------
    InvalidParameterError
        For the Euclidean norm, which has no rank-weight form, or when
        fitted weights are not non-increasing.
    """
    family, n = params.family, params.n
    if family in (NormFamily.CHAUDHURI_ORIGINAL, NormFamily.LAMBDA_OPTIMAL):
        return WeightProfile.two_weight(1.0, params["lam"], n)
    if family == NormFamily.MU_LAMBDA:
        return WeightProfile.two_weight(params["mu"], params["lam"], n)
    if family == NormFamily.MU_LAMBDA_INFERIOR:
        lam = params["lam"]
        weights: List[float] = [lam] * (n - 1) + [params["mu"]]
        return WeightProfile(tuple(weights), norm_inducing=False)
    if family == NormFamily.BARNI:
        delta = params["delta"]
        return WeightProfile(tuple(delta * a for a in params.alphas))
    if family == NormFamily.SEOL_CHEUN_AB:
        a, b = params["a"], params["b"]
        return WeightProfile.two_weight(a + b, b, n)
    if family == NormFamily.MANHATTAN:
        return WeightProfile((1.0,) * n)
    if family == NormFamily.CHESSBOARD:
        return WeightProfile((1.0,) + (0.0,) * (n - 1), norm_inducing=False)
    raise InvalidParameterError(
        f"{family.value} has no weighted city-block form"
    )
