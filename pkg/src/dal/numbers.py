"""Test reals with known or engineered approximation behaviour."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError
from .realnum import RealSpec

DEFAULT_SEED = 20240601


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    spec: RealSpec
    expected_lambda1: Fraction | None = None
    notes: str = ""
    slow_qmax: int | None = None  # larger Qmax needed before the estimate settles
    very_well_approximable: bool = False

    def to_json(self) -> dict:
        e = self.expected_lambda1
        return {
            "name": self.name,
            "spec": str(self.spec),
            "expected_lambda1": None if e is None else str(e),
            "very_well_approximable": self.very_well_approximable,
            "slow_qmax": self.slow_qmax,
            "notes": self.notes,
        }


def make_prescribed_lambda1(w) -> RealSpec:
    """Continued fraction [0; a_1, a_2, ...] with a_{k+1} = ceil(q_k^(w-1)).

    Then ||q_k xi|| is about 1/(a_{k+1} q_k) = q_k^-w, so lambda_1 = w.
    """
    w = Fraction(str(w)) if isinstance(w, float) else Fraction(w)
    if w <= 1:
        raise PreconditionError("w must exceed 1")
    return RealSpec.prescribed(w)


def catalog(seed: int = DEFAULT_SEED) -> list[CatalogEntry]:
    one = Fraction(1)
    out = [
        CatalogEntry("golden", RealSpec.golden(), one, "all partial quotients 1"),
        CatalogEntry("sqrt:2", RealSpec.sqrt(2), one, "quadratic irrational, periodic expansion"),
        CatalogEntry("cbrt:2", RealSpec.cbrt(2), one, "cubic irrational; Roth",
                     slow_qmax=10**7),
        CatalogEntry(
            "quartic",
            RealSpec.algebraic([-1, -1, 0, 0, 1], 1, 2),
            one,
            "real root of x^4-x-1 in [1,2]; Roth",
            slow_qmax=10**6,
        ),
    ]
    for w in (3, 5, 7, 9):
        out.append(
            CatalogEntry(
                f"liouville:w={w}",
                RealSpec.liouville(w, 2),
                Fraction(w - 1),
                f"partial sums 2^-e_k with e_k = {w}^k give ||q xi|| ~ q^-{w - 1}",
                very_well_approximable=True,
            )
        )
    for w in (2, 3, 6):
        out.append(
            CatalogEntry(
                f"prescribed:w={w}",
                make_prescribed_lambda1(w),
                Fraction(w),
                "a_{k+1} = ceil(q_k^(w-1))",
                very_well_approximable=True,
            )
        )
    for i in range(3):
        out.append(
            CatalogEntry(
                f"cfrand:{i}",
                RealSpec.cfrand(seed + i, 5),
                one,
                "seeded quotients in [1,5]; badly approximable",
                slow_qmax=10**6,
            )
        )
    return out


def catalog_entry(name: str, seed: int = DEFAULT_SEED) -> CatalogEntry:
    for e in catalog(seed):
        if e.name == name:
            return e
    raise KeyError(name)


def catalog_jsonl(seed: int = DEFAULT_SEED) -> str:
    return "".join(json.dumps(e.to_json(), sort_keys=True) + "\n" for e in catalog(seed))
