"""Closed-form dimension counts and the existence inequalities.

Everything here is integer arithmetic. Range guards (``g - 2 <= d <= 2g - 2``,
``k >= 2``) produce warnings rather than errors so grid sweeps can chart the
region where the hypotheses fail.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import comb

from .errors import ValidationError

CASES = ("EE", "EO", "OE", "OO")

# triples where the inequality holds but only semistable series are produced
SEMISTABLE_ONLY = frozenset({(1, 0, 2), (2, 2, 2), (3, 2, 2), (4, 6, 4)})
# stability here needs a separate argument on smooth curves
SPECIAL_CASES = frozenset({(3, 4, 3)})


class RangeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class BNParams:
    g: int
    d: int
    k: int

    def __post_init__(self):
        for name in ("g", "d", "k"):
            if not isinstance(getattr(self, name), int):
                raise ValidationError(f"{name} must be an integer")
        if self.g < 0:
            raise ValidationError("genus must be nonnegative")

    @property
    def d1(self) -> int:
        """d' = floor(d/2)."""
        return self.d // 2

    @property
    def k1(self) -> int:
        """k' = floor(k/2)."""
        return self.k // 2

    @property
    def case(self) -> str:
        return ("E" if self.d % 2 == 0 else "O") + ("E" if self.k % 2 == 0 else "O")

    @property
    def triple(self) -> tuple[int, int, int]:
        return (self.g, self.d, self.k)

    def range_problems(self) -> list[str]:
        out = []
        if self.k < 2:
            out.append("k < 2")
        if not self.g - 2 <= self.d <= 2 * self.g - 2:
            out.append("d outside [g-2, 2g-2]")
        if self.d < 0:
            out.append("negative degree")
        return out

    def warn_if_out_of_range(self) -> None:
        for msg in self.range_problems():
            warnings.warn(f"{self.triple}: {msg}", RangeWarning, stacklevel=3)


def _p(p) -> BNParams:
    return p if isinstance(p, BNParams) else BNParams(*p)


def rho(p) -> int:
    p = _p(p)
    return 4 * p.g - 3 - p.k * (p.k - p.d + 2 * p.g - 2)


def rho_special(p) -> int:
    p = _p(p)
    return rho(p) - p.g + comb(p.k, 2)


def varying_det_dimension(p) -> int:
    p = _p(p)
    return rho(p) + comb(p.k, 2) - (p.d - p.g + 3)


def exceeds_rho_minus_1(p) -> bool:
    """Whether the varying-determinant count is strictly above rho - 1."""
    p = _p(p)
    return comb(p.k, 2) > p.d - p.g + 2


@dataclass(frozen=True)
class Inequality:
    holds: bool
    lhs: int
    rhs: int

    @property
    def equality(self) -> bool:
        return self.lhs == self.rhs

    def as_dict(self) -> dict:
        return {"holds": self.holds, "lhs": self.lhs, "rhs": self.rhs, "equality": self.equality}


def main_inequality(p) -> Inequality:
    p = _p(p)
    rhs = p.k**2 + 2 * p.k * (2 * p.g - 2 - p.d)
    if p.d % 2:
        rhs += 4
    lhs = 4 * p.g
    return Inequality(lhs >= rhs, lhs, rhs)


@dataclass(frozen=True)
class CaseInequality(Inequality):
    case: str = ""
    equivalent_to_main: bool = True

    def as_dict(self) -> dict:
        out = super().as_dict()
        out.update(case=self.case, equivalent_to_main=self.equivalent_to_main)
        return out


def structured_length(p, case: str | None = None) -> int:
    """Number of components the construction pins down; the case inequality reads g >= this."""
    p = _p(p)
    case = p.case if case is None else case
    k1, d1, g = p.k1, p.d1, p.g
    if case == "EE":
        return k1**2 + 2 * k1 * (g - 1 - d1)
    if case == "EO":
        return k1**2 + k1 + 1 + (2 * k1 + 1) * (g - 1 - d1)
    if case == "OE":
        return k1**2 + 1 + k1 * (2 * g - 2 - (2 * d1 + 1))
    if case == "OO":
        return k1**2 + 1 + (2 * k1 + 1) * (g - 1 - d1)
    raise ValidationError(f"unknown case {case!r}")


def case_inequality(p, case: str | None = None) -> CaseInequality:
    p = _p(p)
    case = p.case if case is None else case.upper()
    if case not in CASES:
        raise ValidationError(f"unknown case {case!r}")
    if case != p.case:
        raise ValidationError(f"{p.triple} has parity case {p.case}, not {case}")
    rhs = structured_length(p, case)
    holds = p.g >= rhs
    return CaseInequality(holds, p.g, rhs, case=case, equivalent_to_main=holds == main_inequality(p).holds)


def stable_exception(p) -> bool:
    return _p(p).triple in SEMISTABLE_ONLY


def stability_status(p) -> str:
    """Expected verdict for a triple in range: Stable, SemistableOnly or SpecialCase."""
    t = _p(p).triple
    if t in SEMISTABLE_ONLY:
        return "SemistableOnly"
    if t in SPECIAL_CASES:
        return "SpecialCase"
    return "Stable"


def parameter_grid(gmax: int, kmax: int = 8, kmin: int = 2):
    """All (g, d, k) with 0 <= d, g - 2 <= d <= 2g - 2 and kmin <= k <= kmax."""
    for g in range(0, gmax + 1):
        for d in range(max(g - 2, 0), 2 * g - 1):
            for k in range(kmin, kmax + 1):
                yield BNParams(g, d, k)


def dims_report(p) -> dict:
    p = _p(p)
    main = main_inequality(p)
    out = {
        "g": p.g,
        "d": p.d,
        "k": p.k,
        "case": p.case,
        "rho": rho(p),
        "rho_L": rho_special(p),
        "varying_det_dim": varying_det_dimension(p),
        "exceeds_rho_minus_1": exceeds_rho_minus_1(p),
        "main_inequality": main.as_dict(),
        "semistable_only_exception": stable_exception(p),
        "special_case": p.triple in SPECIAL_CASES,
        "warnings": p.range_problems(),
    }
    if p.k >= 2:
        out["case_inequality"] = case_inequality(p).as_dict()
    return out


# ---------------------------------------------------------------------------
# strata of sections on a genus-0 component


@dataclass(frozen=True)
class StratumDims:
    target_dim: int
    stratum_dim: int
    fiber_dim: int

    @property
    def total(self) -> int:
        return self.stratum_dim + self.fiber_dim

    def as_dict(self) -> dict:
        return {"target_dim": self.target_dim, "stratum_dim": self.stratum_dim, "fiber_dim": self.fiber_dim}


def g0_stratum_dims(
    d: int,
    S: int | None = None,
    *,
    S1: int | None = None,
    S2: int | None = None,
    m: int = 1,
    d_rest: int | None = None,
) -> StratumDims:
    """Dimension bookkeeping for sections on a tree of rational components.

    Pass ``S`` (vanishing nodes) for the nondegenerate locus. For the locus
    where sections vanish identically on some components pass ``S1``, ``S2``,
    the number ``m >= 1`` of connected vanishing pieces and ``d_rest``, the
    degree left on the other components (defaults to ``d``).
    """
    if S is not None:
        if S < 0 or d < 0:
            raise ValidationError("sizes must be nonnegative")
        return StratumDims(d, d - 2 * S, S)
    if S1 is None or S2 is None:
        raise ValidationError("give either S or both S1 and S2")
    rest = d if d_rest is None else d_rest
    if min(S1, S2, d, rest) < 0 or m < 1:
        raise ValidationError("sizes must be nonnegative and m >= 1")
    if rest > d:
        raise ValidationError("d_rest cannot exceed d")
    return StratumDims(rest, rest - 2 * S1 - S2, S1 + S2 - m)
