"""
Adjoint systems of unions of lines and the quantities built from them.

For a union of lines the singular points are ordinary, so the (n, m)-adjoint
system is the plane system of degree n*d - 3*m with multiplicity
n*m_i - m at every singular point P_i (only positive values impose
conditions). It is defined for m >= n >= 1.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

from src.models.errors import AdjointIndexError
from src.models.schemas import AdjointReportDoc, PlurigeneraDoc, PlurigenusDoc
from src.services.configuration.arrangement import LineArrangement, type_of_arrangement
from src.services.configuration.curve_type import CurveType
from src.services.configuration.families import CONTRACTIBLE_GROUP, THEOREM_MIN_DEGREE, theorem_family_of_type
from src.services.linear_systems.system import (
    FactoredForm,
    LinearSystemResult,
    LinearSystemSpec,
    solve_system,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AdjointDescriptor:
    """Type-level adjoint system (degree; multiplicities), degree possibly negative."""

    degree: int
    mults: Tuple[int, ...]

    @property
    def obviously_empty(self) -> bool:
        return self.degree < 0 or (bool(self.mults) and self.mults[0] > self.degree)

    def render(self) -> str:
        groups: List[Tuple[int, int]] = []
        for mu in self.mults:
            if groups and groups[-1][0] == mu:
                groups[-1] = (mu, groups[-1][1] + 1)
            else:
                groups.append((mu, 1))
        body = ", ".join(f"{mu}^{count}" if count > 1 else str(mu) for mu, count in groups)
        return f"({self.degree}; {body})" if body else f"({self.degree};)"

    def __str__(self) -> str:
        return self.render()


def _check_indices(n: int, m: int) -> None:
    if n < 1:
        raise AdjointIndexError(f"n = {n} must be positive")
    if m < n:
        raise AdjointIndexError(f"ad_{{{n},{m}}} needs m >= n")


def adjoint_type(t: CurveType, n: int, m: int) -> AdjointDescriptor:
    """(n*d - 3m; n*m_0 - m, ..., n*m_q - m) with non-positive entries dropped."""
    _check_indices(n, m)
    mults = tuple(n * mi - m for mi in t.mults if n * mi - m > 0)
    return AdjointDescriptor(n * t.d - 3 * m, mults)


def adjoint_spec(arr: LineArrangement, n: int, m: int) -> LinearSystemSpec:
    _check_indices(n, m)
    conditions = [(p, n * mult - m) for p, mult in arr.singular_points()]
    return LinearSystemSpec.build(n * arr.d - 3 * m, conditions)


def adjoint_system(arr: LineArrangement, n: int, m: int, want_witness: bool = False) -> LinearSystemResult:
    return solve_system(adjoint_spec(arr, n, m), want_witness=want_witness)


def adjoint_dim(arr: LineArrangement, n: int, m: int) -> int:
    return adjoint_system(arr, n, m).dim


@dataclass(frozen=True)
class AdjointSequence:
    n: int
    dims: Tuple[int, ...]

    @property
    def first_empty_m(self) -> Optional[int]:
        for offset, dim in enumerate(self.dims):
            if dim < 0:
                return self.n + offset
        return None

    @property
    def stabilized(self) -> bool:
        """Once -1, the entries stay -1."""
        first = self.first_empty_m
        if first is None:
            return False
        return all(dim < 0 for dim in self.dims[first - self.n :])

    @property
    def all_empty(self) -> bool:
        return all(dim < 0 for dim in self.dims)

    def to_doc(self) -> AdjointReportDoc:
        return AdjointReportDoc(
            n=self.n, dims=list(self.dims), first_empty_m=self.first_empty_m, stabilized=self.stabilized
        )


def adjoint_sequence(arr: LineArrangement, n: int) -> AdjointSequence:
    """dim ad_{n,m} for m = n, n+1, ... up to and including the first m with n*d - 3m < 0."""
    _check_indices(n, n)
    dims = []
    m = n
    while True:
        dims.append(adjoint_dim(arr, n, m))
        if n * arr.d - 3 * m < 0:
            break
        m += 1
    sequence = AdjointSequence(n, tuple(dims))
    logger.info(f"🔍 adjoint sequence n={n} of d={arr.d}: {list(dims)}")
    return sequence


def vanishing_adjoints(arr: LineArrangement) -> bool:
    """ad_m = ad_{1,m} empty for every m >= 1."""
    return adjoint_sequence(arr, 1).all_empty


@dataclass(frozen=True)
class PlurigenusReport:
    m: int
    value: int
    witness: Optional[FactoredForm] = None

    def to_doc(self) -> PlurigenusDoc:
        witness = self.witness.to_doc(self.m, self.m, "member of m(C + K)") if self.witness else None
        return PlurigenusDoc(m=self.m, value=self.value, witness=witness)


def log_plurigenus(arr: LineArrangement, m: int) -> PlurigenusReport:
    """P_m = dim ad_{m,m} + 1, with a member when positive."""
    if m < 1:
        raise AdjointIndexError(f"plurigenus index {m} must be positive")
    result = adjoint_system(arr, m, m, want_witness=True)
    value = result.dim + 1
    return PlurigenusReport(m, value, result.witness if value > 0 else None)


@dataclass(frozen=True)
class KodairaVerdict:
    """Outcome of the bounded test: first m <= bound with P_m > 0, if any."""

    bound: int
    reports: Tuple[PlurigenusReport, ...]
    witness_m: Optional[int]
    agrees_with_theorem: Optional[bool] = None

    @property
    def negative(self) -> bool:
        return self.witness_m is None

    @property
    def label(self) -> str:
        if self.negative:
            return f"negative_up_to({self.bound})"
        return f"at_least_zero(m={self.witness_m})"

    def to_doc(self) -> PlurigeneraDoc:
        return PlurigeneraDoc(
            bound=self.bound,
            values=[r.to_doc() for r in self.reports],
            verdict=self.label,
            witness_m=self.witness_m,
            agrees_with_theorem=self.agrees_with_theorem,
        )


def theorem_agreement(arr: LineArrangement, bound: int, witness_m: Optional[int]) -> Optional[bool]:
    """
    Compare a bounded verdict with the type table for d >= 12: the (d; d-2)
    group has P_m = 0 for all m, the (d; d-3) groups have P_3 > 0. None when
    the table says nothing or the bound is too small to tell.
    """
    if arr.d < THEOREM_MIN_DEGREE:
        return None
    tag = theorem_family_of_type(type_of_arrangement(arr))
    if tag is None:
        return None
    if tag.group == CONTRACTIBLE_GROUP:
        return witness_m is None
    if witness_m is not None:
        return witness_m <= 3
    return False if bound >= 3 else None


def kodaira_bounded(arr: LineArrangement, bound: int, stop_at_first: bool = True) -> KodairaVerdict:
    if bound < 1:
        raise AdjointIndexError(f"Kodaira bound {bound} must be positive")
    reports = []
    witness_m = None
    for m in range(1, bound + 1):
        report = log_plurigenus(arr, m)
        reports.append(report)
        if report.value > 0 and witness_m is None:
            witness_m = m
            if stop_at_first:
                break
    agrees = theorem_agreement(arr, bound, witness_m)
    if agrees is False:
        logger.error(f"❌ d={arr.d}: plurigenera up to {bound} give first m={witness_m}, against the type table")
    verdict = KodairaVerdict(bound, tuple(reports), witness_m, agrees)
    logger.info(f"Kodaira test d={arr.d} up to {bound}: {verdict.label}")
    return verdict
