import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import yaml

from norm_approx.core.datastructures import family_names
from norm_approx.core.errors import InvalidParameterError


class NormFamily(str, Enum):
    """Tag of an approximation family or of an exact norm."""

    CHAUDHURI_ORIGINAL = family_names.CHAUDHURI_ORIGINAL
    LAMBDA_OPTIMAL = family_names.LAMBDA_OPTIMAL
    MU_LAMBDA = family_names.MU_LAMBDA
    MU_LAMBDA_INFERIOR = family_names.MU_LAMBDA_INFERIOR
    BARNI = family_names.BARNI
    SEOL_CHEUN_AB = family_names.SEOL_CHEUN_AB
    MANHATTAN = family_names.MANHATTAN
    EUCLIDEAN = family_names.EUCLIDEAN
    CHESSBOARD = family_names.CHESSBOARD

    @property
    def is_exact(self) -> bool:
        return self.value in family_names.exact_families

    @staticmethod
    def parse(name: str) -> "NormFamily":
        """Resolves a family from its tag or its command-line alias.

        Raises
        ------
        KeyError
            If the name is unknown.
        """
        key = name.strip().lower()
        key = family_names.family_aliases.get(key, key)
        for family in NormFamily:
            if family.value == key:
                return family
        raise KeyError(f"unknown norm family {name!r}")


# Parameter names each family must carry.
_required_values = {
    NormFamily.CHAUDHURI_ORIGINAL: ("lam",),
    NormFamily.LAMBDA_OPTIMAL: ("lam",),
    NormFamily.MU_LAMBDA: ("mu", "lam"),
    NormFamily.MU_LAMBDA_INFERIOR: ("mu", "lam"),
    NormFamily.BARNI: ("delta",),
    NormFamily.SEOL_CHEUN_AB: ("a", "b"),
    NormFamily.MANHATTAN: (),
    NormFamily.EUCLIDEAN: (),
    NormFamily.CHESSBOARD: (),
}


@dataclass(frozen=True)
class NormParams:
    """Parameters of one approximation family at one dimension.

    Attributes
    ----------
    family: NormFamily
        The family the parameters belong to.
    n: int
        The dimension the parameters were derived for, n >= 2, or n >= 1
        for the exact norms.
    values: Dict[str, float]
        Family-specific scalars: ``lam`` (Chaudhuri and optimal single
        parameter), ``mu`` and ``lam`` (both Rhodes two-parameter
        variants), ``delta`` (Barni), ``a`` and ``b`` (Seol-Cheun).
    alphas: Tuple[float, ...]
        Barni's per-rank weights, empty for the other families.
    fit_samples: Optional[int]
        Number of Gaussian vectors the Seol-Cheun fit used.
    seed: Optional[int]
        Seed of the Seol-Cheun fit.
    workers: int
        Worker count of the Seol-Cheun fit; the fitted values are only
        reproducible for the same count.
    """

    family: NormFamily

    n: int

    values: Dict[str, float] = field(default_factory=dict)

    alphas: Tuple[float, ...] = tuple()

    fit_samples: Optional[int] = None

    seed: Optional[int] = None

    workers: int = 1

    def __post_init__(self) -> None:
        # exact norms are defined on the real line too
        minimum = 1 if self.family.is_exact else 2
        if self.n < minimum:
            raise InvalidParameterError(
                f"need n >= {minimum} for {self.family.value}, got {self.n}"
            )
        for key in _required_values[self.family]:
            if key not in self.values:
                raise InvalidParameterError(
                    f"{self.family.value} parameters need {key!r}"
                )
            if not math.isfinite(self.values[key]):
                raise InvalidParameterError(f"{key} is not finite")
        self._check_family_invariants()

    def _check_family_invariants(self) -> None:
        v = self.values
        family = self.family
        if family == NormFamily.CHAUDHURI_ORIGINAL:
            ok = 0.0 < v["lam"] <= 0.5
        elif family == NormFamily.LAMBDA_OPTIMAL:
            ok = 0.0 < v["lam"] < 0.5
        elif family == NormFamily.MU_LAMBDA:
            ok = 0.0 < v["lam"] < v["mu"]
        elif family == NormFamily.MU_LAMBDA_INFERIOR:
            # lam = 1 is reached at n = 2 where the closed form collapses
            ok = v["mu"] == 0.0 and 0.0 < v["lam"] <= 1.0
        elif family == NormFamily.BARNI:
            al = self.alphas
            ok = (
                v["delta"] > 0.0
                and len(al) == self.n
                and al[0] == 1.0
                and all(x >= y for x, y in zip(al, al[1:]))
                and al[-1] > 0.0
            )
        elif family == NormFamily.SEOL_CHEUN_AB:
            ok = v["a"] > 0.0 and v["b"] > 0.0 and self.fit_samples is not None
        else:
            ok = True
        if not ok:
            raise InvalidParameterError(
                f"invalid {family.value} parameters for n={self.n}: "
                f"{v} {self.alphas}"
            )

    def __getitem__(self, key: str) -> float:
        return self.values[key]

    def to_yaml(self) -> str:
        """Transforms the parameters into a YAML string.

        See Also
        --------
        norm_approx.core.datastructures.params.NormParamsIO.to_yaml()
        """
        return NormParamsIO.to_yaml(self)

    def to_dict(self) -> Dict[str, Any]:
        return NormParamsIO.to_dict(self)

    @staticmethod
    def from_yaml(yaml_string: str) -> "NormParams":
        return NormParamsIO.from_yaml(yaml_string)

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> "NormParams":
        return NormParamsIO.from_dict(data)


class NormParamsIO:
    """Helper class for `NormParams` transformation to and from YAML and
    plain dictionaries."""

    @staticmethod
    def to_dict(params: NormParams) -> Dict[str, Any]:
        """Plain-dictionary form; only keys with a value are emitted."""
        out: Dict[str, Any] = {
            "family": params.family.value,
            "n": params.n,
            "values": dict(sorted(params.values.items())),
        }
        if params.alphas:
            out["alphas"] = list(params.alphas)
        if params.fit_samples is not None:
            out["fit_samples"] = params.fit_samples
            out["seed"] = params.seed
            out["workers"] = params.workers
        return out

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> NormParams:
        """Builds `NormParams` from the output of `to_dict`.

        Raises
        ------
        InvalidParameterError
            If the family is unknown or the values violate its invariants.
        """
        try:
            family = NormFamily.parse(str(data["family"]))
        except KeyError as e:
            raise InvalidParameterError(str(e)) from e
        raw_values = data.get("values") or {}
        return NormParams(
            family=family,
            n=int(data["n"]),
            values={k: float(v) for k, v in raw_values.items()},
            alphas=tuple(float(a) for a in data.get("alphas", ())),
            fit_samples=data.get("fit_samples"),
            seed=data.get("seed"),
            workers=int(data.get("workers", 1)),
        )

    @staticmethod
    def to_yaml(params: NormParams) -> str:
        return yaml.safe_dump(NormParamsIO.to_dict(params), sort_keys=False)

    @staticmethod
    def from_yaml(yaml_string: str) -> NormParams:
        return NormParamsIO.from_dict(yaml.safe_load(yaml_string))
