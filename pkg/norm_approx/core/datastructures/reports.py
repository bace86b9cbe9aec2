import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional, Tuple

import yaml

from norm_approx.core.datastructures.params import NormFamily
from norm_approx.core.errors import NormDomainError
from norm_approx.core.streams import DEFAULT_BATCH_SIZE
from norm_approx.core.utils import DEFAULT_SEED

ANALYTIC = "analytic"
EMPIRICAL = "empirical"


@dataclass(frozen=True)
class SamplerConfig:
    """Configuration of a uniform sampler on the unit sphere.

    Attributes
    ----------
    n: int
        Dimension of the ambient space, n >= 2.
    seed: int
        Root seed; worker ``k`` draws from the ``k``-th spawned child.
    batch_size: int
        Maximum number of points materialised at once.
    workers: int
        Number of independent sub-streams (and threads). Results are
        deterministic for a fixed worker count.
    """

    n: int

    seed: int = DEFAULT_SEED

    batch_size: int = DEFAULT_BATCH_SIZE

    workers: int = 1

    def __post_init__(self) -> None:
        if self.n < 2:
            raise NormDomainError(f"sampler needs n >= 2, got {self.n}")
        if self.batch_size < 1:
            raise NormDomainError("batch_size must be positive")
        if self.workers < 1:
            raise NormDomainError("workers must be positive")


@dataclass(frozen=True)
class ErrorReport:
    """Average and maximum relative error of one family at one dimension.

    Attributes
    ----------
    family: NormFamily
        The approximation measured.
    n: int
        The dimension.
    are: float
        Mean of ``|D(x) - 1|`` over the sample.
    mre_e: float
        Maximum of ``|D(x) - 1|`` over the sample.
    mre_t: Optional[float]
        Analytical maximum relative error, None when no closed form
        exists.
    samples_used: int
        Size of the final (nested) sample.
    converged: bool
        Whether two consecutive schedule steps agreed within
        `convergence_tol`.
    convergence_tol: float
        The tolerance on both ARE and MRE_e.
    seed: int
        Root seed of the sample.
    are_stderr: float
        Standard error of `are`.
    history: Tuple[Tuple[int, float, float], ...]
        ``(samples, are, mre_e)`` after every schedule step.
    """

    family: NormFamily

    n: int

    are: float

    mre_e: float

    mre_t: Optional[float]

    samples_used: int

    converged: bool

    convergence_tol: float

    seed: int = DEFAULT_SEED

    are_stderr: float = 0.0

    history: Tuple[Tuple[int, float, float], ...] = tuple()

    def __post_init__(self) -> None:
        assert self.are >= 0.0 and self.mre_e >= 0.0
        # a maximum dominates the mean over the same sample
        assert self.mre_e >= self.are * (1.0 - 1e-12)

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out["family"] = self.family.value
        out["history"] = [list(step) for step in self.history]
        return out

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> "ErrorReport":
        values = dict(data)
        values["family"] = NormFamily.parse(values["family"])
        steps = values.get("history", ())
        values["history"] = tuple(
            (int(c), float(a), float(m)) for c, a, m in steps
        )
        return ErrorReport(**values)

    @staticmethod
    def from_yaml(yaml_string: str) -> "ErrorReport":
        return ErrorReport.from_dict(yaml.safe_load(yaml_string))


@dataclass(frozen=True)
class CoverageEstimate:
    """Order-of-magnitude sample count for an epsilon-dense covering of
    the unit sphere in R^n.

    Attributes
    ----------
    n: int
        Dimension of the ambient space.
    epsilon: float
        Covering radius.
    patch_count_exact: float
        Sphere area over the volume of an (n-1)-ball of radius epsilon.
    patch_count_approx: float
        ``n sqrt(pi) / epsilon^(n-1)``.
    expected_samples: float
        ``N ln N`` with ``N = patch_count_exact``; ``math.inf`` when it
        exceeds the double range (see `log10_expected_samples`).
    log10_expected_samples: float
        Base-10 logarithm of ``N ln N``, always finite.
    log_domain: bool
        True when the linear values overflow and only the logarithms are
        meaningful.
    log_patch_count: float
        Natural logarithm of `patch_count_exact`.
    """

    n: int

    epsilon: float

    patch_count_exact: float

    patch_count_approx: float

    expected_samples: float

    log10_expected_samples: float

    log_domain: bool

    log_patch_count: float = field(default=0.0)

    def __post_init__(self) -> None:
        assert self.patch_count_exact > 0.0
        if not self.log_domain and self.patch_count_exact > math.e:
            N = self.patch_count_exact
            assert self.expected_samples >= N * math.log(N) * (1.0 - 1e-12)


@dataclass(frozen=True)
class ReportRow:
    """One row of a reproduced table.

    Attributes
    ----------
    table: str
        Table identifier (``"table3"``, ``"table4"``, ``"mre_curve"``).
    n: int
        Dimension.
    family: str
        Family tag, or ``"all"`` for rows spanning several families.
    columns: Tuple[Tuple[str, Optional[float]], ...]
        Named values in output order.
    provenance: str
        ``"analytic"`` or ``"empirical"``.
    samples_used: Optional[int]
        Sample size behind empirical values.
    seed: Optional[int]
        Seed behind empirical values.
    converged: Optional[bool]
        Convergence flag of empirical values.
    """

    table: str

    n: int

    family: str

    columns: Tuple[Tuple[str, Optional[float]], ...]

    provenance: str = ANALYTIC

    samples_used: Optional[int] = None

    seed: Optional[int] = None

    converged: Optional[bool] = None

    def __post_init__(self) -> None:
        assert self.provenance in (ANALYTIC, EMPIRICAL)
        if self.provenance == EMPIRICAL:
            assert self.samples_used is not None and self.seed is not None

    def value(self, name: str) -> Optional[float]:
        for key, v in self.columns:
            if key == name:
                return v
        raise KeyError(name)
