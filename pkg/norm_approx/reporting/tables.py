"""Builders for the error tables, the analytic error curve, the coverage
summary and the operation-count check, plus their CSV and JSON writers.

Every builder returns plain data (`ReportRow` lists or dictionaries); the
command-line front end only parses flags and prints.
"""
import csv
import dataclasses
import math
from dataclasses import dataclass, field
from typing import (
    IO,
    Any,
    Callable,
    Dict,
    List,
    Optional,
    Sequence,
    Tuple,
)

import yaml

from norm_approx.core.coverage import (
    coverage_deficiency,
    expected_samples,
    tail_bound,
)
from norm_approx.core.datastructures.params import NormFamily, NormParams
from norm_approx.core.datastructures.reports import (
    ANALYTIC,
    EMPIRICAL,
    ReportRow,
    SamplerConfig,
)
from norm_approx.core.datastructures.vectors import (
    OpCount,
    VectorN,
    WeightProfile,
)
from norm_approx.core.norms import (
    P_INF,
    norm_p,
    norm_p_counted,
    norm_weighted,
    norm_weighted_counted,
)
from norm_approx.core.optimal_params import (
    DEFAULT_FIT_SAMPLES,
    barni_optimal,
    mre_lambda_optimal,
    mu_lambda_optimal,
    params_for,
    solve_lambda_optimal,
    sup_relative_error,
    weight_profile_of,
)
from norm_approx.core.sampling import (
    DEFAULT_CHECK_FROM,
    DEFAULT_FIXED_COUNT,
    DEFAULT_TOL,
    converged_errors,
    default_schedule,
    fixed_sample_mre,
    mre_theoretical,
    sample_sphere,
)
from norm_approx.core.sorting_network import comparison_band
from norm_approx.core.streams import DEFAULT_BATCH_SIZE
from norm_approx.core.utils import DEFAULT_SEED, _logger

TABLE3 = "table3"
TABLE4 = "table4"
MRE_CURVE = "mre_curve"

# Column prefixes of the three minimax families.
MINIMAX_FAMILIES: Tuple[Tuple[str, NormFamily], ...] = (
    ("lambda", NormFamily.LAMBDA_OPTIMAL),
    ("mulambda", NormFamily.MU_LAMBDA),
    ("barni", NormFamily.BARNI),
)

TABLE_DIMENSIONS = tuple(range(2, 11))

SHORT_DIGITS = 6
FULL_DIGITS = 17

_TRUE_WORDS = frozenset({"true", "yes", "on", "1"})
_FALSE_WORDS = frozenset({"false", "no", "off", "0"})


def _parse_flag(value: Any) -> bool:
    """`bool(value)` for booleans and integers, the usual YAML words for
    strings; anything else is rejected."""
    if isinstance(value, (bool, int)):
        return bool(value)
    if isinstance(value, str):
        word = value.strip().lower()
        if word in _TRUE_WORDS:
            return True
        if word in _FALSE_WORDS:
            return False
    raise ValueError(f"not a boolean setting: {value!r}")


_SETTING_TYPES: Dict[str, Callable[[Any], Any]] = {
    "seed": int,
    "threads": int,
    "tol": float,
    "fit_samples": int,
    "fixed_budget": int,
    "batch_size": int,
    "full_precision": _parse_flag,
    "check_from": int,
}


@dataclass(frozen=True)
class RunSettings:
    """Defaults shared by every command.

    Attributes
    ----------
    seed: int
        Root seed of every random stream.
    threads: int
        Worker count; results are reproducible for a fixed count.
    schedule: Tuple[int, ...]
        Cumulative sample sizes of the convergence loop.
    tol: float
        Convergence tolerance on ARE and MRE_e.
    fit_samples: int
        Gaussian vectors used by the least-squares fit.
    fixed_budget: int
        Sample size of the fixed-budget protocol.
    batch_size: int
        Sampler batch size.
    full_precision: bool
        Print 17 significant digits instead of 6.
    check_from: int
        Smallest sample size at which the convergence loop may stop.
    """

    seed: int = DEFAULT_SEED

    threads: int = 1

    schedule: Tuple[int, ...] = field(default_factory=default_schedule)

    tol: float = DEFAULT_TOL

    fit_samples: int = DEFAULT_FIT_SAMPLES

    fixed_budget: int = DEFAULT_FIXED_COUNT

    batch_size: int = DEFAULT_BATCH_SIZE

    full_precision: bool = False

    check_from: int = DEFAULT_CHECK_FROM

    def sampler(self, n: int, seed: Optional[int] = None) -> SamplerConfig:
        return SamplerConfig(
            n=n,
            seed=self.seed if seed is None else seed,
            batch_size=self.batch_size,
            workers=self.threads,
        )

    @property
    def fit_seed(self) -> int:
        # keeps the fit sample apart from the evaluation sample
        return self.seed + 1

    @property
    def fixed_seed(self) -> int:
        # the fixed-budget sample must not be a prefix of the nested one
        return self.seed + 2

    def replace(self, **overrides: Any) -> "RunSettings":
        """Copy with every override that is not None applied."""
        given: Dict[str, Any] = {}
        for key, value in overrides.items():
            if value is None:
                continue
            if key == "schedule":
                given[key] = tuple(int(s) for s in value)
            else:
                # YAML reads "1e-4" as a string
                given[key] = _SETTING_TYPES[key](value)
        return dataclasses.replace(self, **given)

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> "RunSettings":
        known = {f.name for f in dataclasses.fields(RunSettings)}
        unknown = set(data) - known
        if unknown:
            raise KeyError(f"unknown settings {sorted(unknown)}")
        return RunSettings().replace(**data)

    @staticmethod
    def from_yaml(yaml_string: str) -> "RunSettings":
        return RunSettings.from_dict(yaml.safe_load(yaml_string) or {})

    def to_yaml(self) -> str:
        data = dataclasses.asdict(self)
        data["schedule"] = list(self.schedule)
        return yaml.safe_dump(data, sort_keys=False)


# --------------------------------------------------------------------------
# Tables


def table3_row(n: int, settings: RunSettings) -> ReportRow:
    columns: List[Tuple[str, Optional[float]]] = []
    converged = True
    used = 0
    for prefix, family in MINIMAX_FAMILIES:
        report = converged_errors(
            params_for(family, n),
            settings.sampler(n),
            settings.schedule,
            settings.tol,
            settings.check_from,
        )
        columns += [
            (f"{prefix}_are", report.are),
            (f"{prefix}_mre_e", report.mre_e),
            (f"{prefix}_mre_t", report.mre_t),
        ]
        converged = converged and report.converged
        used = max(used, report.samples_used)
    _logger.info("table3 n=%d done, converged=%s", n, converged)
    return ReportRow(
        table=TABLE3,
        n=n,
        family="minimax",
        columns=tuple(columns),
        provenance=EMPIRICAL,
        samples_used=used,
        seed=settings.seed,
        converged=converged,
    )


def table3(
    settings: RunSettings, dimensions: Sequence[int] = TABLE_DIMENSIONS
) -> List[ReportRow]:
    """ARE, MRE_e and MRE_t of the three minimax families per dimension."""
    return [table3_row(n, settings) for n in dimensions]


def table4_row(
    n: int, settings: RunSettings, raw_gaussian: bool = False
) -> ReportRow:
    params = params_for(
        NormFamily.SEOL_CHEUN_AB,
        n,
        fit_samples=settings.fit_samples,
        seed=settings.fit_seed,
        workers=settings.threads,
    )
    fixed_are, fixed_mre = fixed_sample_mre(
        params,
        settings.sampler(n, seed=settings.fixed_seed),
        settings.fixed_budget,
        raw_gaussian=raw_gaussian,
    )
    report = converged_errors(
        params,
        settings.sampler(n),
        settings.schedule,
        settings.tol,
        settings.check_from,
    )
    _logger.info(
        "table4 n=%d a=%.6f b=%.6f fixed mre=%.4f converged mre=%.4f",
        n,
        params["a"],
        params["b"],
        fixed_mre,
        report.mre_e,
    )
    return ReportRow(
        table=TABLE4,
        n=n,
        family=params.family.value,
        columns=(
            ("a", params["a"]),
            ("b", params["b"]),
            ("fixed_are", fixed_are),
            ("fixed_mre_e", fixed_mre),
            ("converged_are", report.are),
            ("converged_mre_e", report.mre_e),
            ("sup_mre", sup_relative_error(weight_profile_of(params))),
        ),
        provenance=EMPIRICAL,
        samples_used=report.samples_used,
        seed=settings.seed,
        converged=report.converged,
    )


def table4(
    settings: RunSettings,
    dimensions: Sequence[int] = TABLE_DIMENSIONS,
    raw_gaussian: bool = False,
) -> List[ReportRow]:
    """Least-squares family under the fixed-budget protocol and under the
    convergence loop, side by side.

    The fixed-budget sample is drawn from its own seed, so it is
    independent of the nested sample of the convergence loop. The last
    column is the exact supremum of the fitted profile, which bounds
    both sampled maxima from above.
    """
    return [table4_row(n, settings, raw_gaussian) for n in dimensions]


def mre_curve(nmax: int = 100) -> List[ReportRow]:
    """Analytic MRE of the three minimax families for n = 2..nmax."""
    rows = []
    for n in range(2, nmax + 1):
        lam = solve_lambda_optimal(n)
        rows.append(
            ReportRow(
                table=MRE_CURVE,
                n=n,
                family="minimax",
                columns=(
                    ("mre_lambda", mre_lambda_optimal(lam)),
                    ("mre_mulambda", mu_lambda_optimal(n)[2]),
                    ("mre_barni", barni_optimal(n)[2]),
                ),
                provenance=ANALYTIC,
            )
        )
    return rows


def _format(value: Optional[float], digits: int) -> str:
    if value is None:
        return ""
    return f"{value:.{digits}g}"


def write_csv(
    rows: Sequence[ReportRow], stream: IO[str], full_precision: bool = False
) -> None:
    """Writes `rows` as CSV with a header row.

    Values carry 6 significant digits, or 17 with `full_precision`.
    Empirical rows get ``converged``, ``samples_used`` and ``seed``
    columns.
    """
    if not rows:
        return
    digits = FULL_DIGITS if full_precision else SHORT_DIGITS
    empirical = rows[0].provenance == EMPIRICAL
    header = ["n"] + [name for name, _ in rows[0].columns]
    if empirical:
        header += ["converged", "samples_used", "seed"]
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    names = header[1:len(rows[0].columns) + 1]
    for row in rows:
        assert [name for name, _ in row.columns] == names
        record = [str(row.n)] + [_format(v, digits) for _, v in row.columns]
        if empirical:
            record += [
                str(bool(row.converged)).lower(),
                str(row.samples_used),
                str(row.seed),
            ]
        writer.writerow(record)


def read_csv(stream: IO[str]) -> List[Dict[str, str]]:
    return list(csv.DictReader(stream))


# --------------------------------------------------------------------------
# Single evaluations


def evaluate_vector(
    values: Sequence[float], family: NormFamily, settings: RunSettings
) -> Dict[str, Optional[float]]:
    """Approximation, exact Euclidean norm, relative error and the
    analytic error bound of `family` at ``x = values``."""
    x = VectorN.of(values)
    params = params_for(
        family,
        x.n,
        fit_samples=settings.fit_samples,
        seed=settings.fit_seed,
        workers=settings.threads,
    )
    exact = norm_p(x, 2.0)
    if family == NormFamily.EUCLIDEAN:
        value = exact
    else:
        value = norm_weighted(x, weight_profile_of(params))
    rel = abs(value - exact) / exact if exact > 0.0 else None
    return {
        "value": value,
        "exact": exact,
        "relative_error": rel,
        "mre_bound": mre_theoretical(params),
    }


def fit_report(n: int, settings: RunSettings) -> Dict[str, Any]:
    params: NormParams = params_for(
        NormFamily.SEOL_CHEUN_AB,
        n,
        fit_samples=settings.fit_samples,
        seed=settings.fit_seed,
        workers=settings.threads,
    )
    return {
        "n": n,
        "a": params["a"],
        "b": params["b"],
        "seed": params.seed,
        "fit_samples": params.fit_samples,
        "workers": params.workers,
    }


# --------------------------------------------------------------------------
# Coverage


def json_number(value: float, log10: float) -> Any:
    """`value` itself, or ``{"log10": log10}`` when it is not finite."""
    if math.isfinite(value):
        return value
    return {"log10": log10}


def coverage_report(n: int, epsilon: float, budget: int) -> Dict[str, Any]:
    """Patch count, coupon collector sample estimate, deficiency of
    `budget` and tail probabilities for s = 1, 2, 3."""
    estimate = expected_samples(n, epsilon)
    log10_patches = estimate.log_patch_count / math.log(10.0)
    ratio = coverage_deficiency(n, epsilon, budget)
    tails: Dict[str, Any] = {}
    for s in (1, 2, 3):
        if estimate.patch_count_exact > 1.0:
            union, limit = tail_bound(estimate.patch_count_exact, float(s))
            tails[str(s)] = {"union": union, "limit": limit}
        else:
            tails[str(s)] = None
    return {
        "n": n,
        "epsilon": epsilon,
        "patch_count": json_number(estimate.patch_count_exact, log10_patches),
        "patch_count_approx": json_number(
            estimate.patch_count_approx,
            math.log10(n * math.sqrt(math.pi)) - (n - 1) * math.log10(epsilon),
        ),
        "expected_samples": json_number(
            estimate.expected_samples, estimate.log10_expected_samples
        ),
        "log_domain": estimate.log_domain,
        "budget": budget,
        "deficiency_ratio": ratio,
        "log10_deficiency_ratio": (
            math.log10(budget) - estimate.log10_expected_samples
        ),
        "tail_bound": tails,
    }


# --------------------------------------------------------------------------
# Operation counts


@dataclass(frozen=True)
class OpCountCheck:
    """Counted operations of one norm against its cost formula.

    Attributes
    ----------
    norm: str
        Row label.
    counted: OpCount
        Operations actually performed.
    expected: OpCount
        The cost formula at this dimension. For sorted evaluation the
        comparison entry is ignored in favour of `comparison_band`.
    comparison_band: Optional[Tuple[int, int]]
        Inclusive bounds on the comparisons of a sort.
    """

    norm: str

    counted: OpCount

    expected: OpCount

    comparison_band: Optional[Tuple[int, int]] = None

    @property
    def matches(self) -> bool:
        if self.comparison_band is None:
            return self.counted == self.expected
        lo, hi = self.comparison_band
        counted = dataclasses.replace(self.counted, comparisons=0)
        expected = dataclasses.replace(self.expected, comparisons=0)
        return counted == expected and lo <= self.counted.comparisons <= hi


def opcount_checks(n: int, seed: int = DEFAULT_SEED) -> List[OpCountCheck]:
    """Instruments every norm at dimension n on one random argument and
    pairs the counts with their cost formulas."""
    point = sample_sphere(SamplerConfig(n, seed), 1)[0]
    x = VectorN.of(float(v) for v in point)
    profiles = {
        family: weight_profile_of(params_for(family, n))
        for family in (
            NormFamily.LAMBDA_OPTIMAL,
            NormFamily.MU_LAMBDA,
            NormFamily.BARNI,
        )
    }
    # the cost of a D_inf + b D_1 does not depend on the fitted values
    ab = WeightProfile.two_weight(1.25, 0.25, n)
    linear = OpCount(n, n - 1, n, 2, 0)
    return [
        OpCountCheck(
            "D1", norm_p_counted(x, 1.0)[1], OpCount(n, 0, n - 1, 0, 0)
        ),
        OpCountCheck(
            "D2", norm_p_counted(x, 2.0)[1], OpCount(0, 0, n - 1, n, 1)
        ),
        OpCountCheck(
            "Dinf", norm_p_counted(x, P_INF)[1], OpCount(n, n - 1, 0, 0, 0)
        ),
        OpCountCheck(
            "D_lambda",
            norm_weighted_counted(x, profiles[NormFamily.LAMBDA_OPTIMAL])[1],
            OpCount(n, n - 1, n - 1, 1, 0),
        ),
        OpCountCheck(
            "D_mu_lambda",
            norm_weighted_counted(x, profiles[NormFamily.MU_LAMBDA])[1],
            linear,
        ),
        OpCountCheck(
            "D_B",
            norm_weighted_counted(
                x, profiles[NormFamily.BARNI], general=True
            )[1],
            OpCount(n, 0, n - 1, n, 0),
            comparison_band=comparison_band(n),
        ),
        OpCountCheck("D_ab", norm_weighted_counted(x, ab)[1], linear),
    ]


def write_opcounts(checks: Sequence[OpCountCheck], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(
        ["norm", "abs", "comp", "add", "mult", "sqrt", "expected", "match"]
    )
    for check in checks:
        expected = [str(e) for e in check.expected.as_tuple()]
        if check.comparison_band is not None:
            lo, hi = check.comparison_band
            expected[1] = f"{lo}..{hi}"
        writer.writerow(
            [check.norm]
            + [str(c) for c in check.counted.as_tuple()]
            + [" ".join(expected), str(check.matches).lower()]
        )
