"""
Structural consequences of m = m0 + m1 + m2 in {d+1, d+2, d+3} for a union of
lines with vanishing adjoints.

For each value of m a short list of cases describes how P0, P1, P2 sit:
collinear on a component, or the vertices of a triangle with one, two or
three sides among the components; how many components miss all three
points; and bounds on the remaining singular points. P1 and P2 range over
every choice of points with multiplicities m1 and m2.
"""

import logging
from dataclasses import dataclass, field
from itertools import permutations
from typing import Dict, List, Optional, Tuple

from src.models.errors import PencilCaseError
from src.services.configuration.arrangement import LineArrangement, type_of_arrangement
from src.services.configuration.curve_type import TypeAnalysis, analyze
from src.services.geometry.projective import ProjPoint, collinear, incident, join

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CaseRule:
    name: str
    collinear: bool
    sides: int  # components among the sides; for collinear points, 1 = the joining line
    missing: int  # components through none of P0, P1, P2, at most
    top: int  # remaining singular points have multiplicity at most
    top_count: Optional[int] = None  # at most this many reach ``top``


CASES: Dict[int, List[CaseRule]] = {
    3: [CaseRule("triangle", False, 3, 0, 3)],
    2: [
        CaseRule("alpha", True, 1, 0, 3),
        CaseRule("beta", False, 3, 1, 4, 2),
        CaseRule("gamma", False, 2, 0, 3),
    ],
    1: [
        CaseRule("alpha'", True, 1, 1, 4),
        CaseRule("beta'", False, 3, 2, 5, 1),
        CaseRule("gamma'", False, 2, 1, 4),
        CaseRule("delta'", False, 1, 0, 3),
    ],
}


@dataclass(frozen=True)
class Placement:
    """Measured position of one choice of P0, P1, P2."""

    points: Tuple[ProjPoint, ProjPoint, ProjPoint]
    collinear: bool
    sides: int
    missing: int
    remaining: Tuple[int, ...]

    def clauses(self, rule: CaseRule) -> Dict[str, bool]:
        top_ok = all(m <= rule.top for m in self.remaining)
        if rule.top_count is not None:
            top_ok = top_ok and sum(1 for m in self.remaining if m == rule.top) <= rule.top_count
        return {
            "collinearity": self.collinear == rule.collinear,
            "sides": self.sides == rule.sides,
            "missing components": self.missing <= rule.missing,
            "remaining multiplicities": top_ok,
        }


def _place(arr: LineArrangement, points: Tuple[ProjPoint, ProjPoint, ProjPoint], others: List[Tuple[ProjPoint, int]]) -> Placement:
    p0, p1, p2 = points
    lines = set(arr.lines)
    is_collinear = collinear(p0, p1, p2)
    if is_collinear:
        sides = int(join(p0, p1) in lines)
    else:
        sides = sum(1 for a, b in ((p0, p1), (p0, p2), (p1, p2)) if join(a, b) in lines)
    missing = sum(1 for line in arr.lines if not any(incident(p, line) for p in points))
    remaining = tuple(mult for q, mult in others if q not in points)
    return Placement(points, is_collinear, sides, missing, remaining)


@dataclass(frozen=True)
class StructureReport:
    applicable: bool
    excess: Optional[int]  # m - d
    cases: Dict[str, bool] = field(default_factory=dict)
    choice: Optional[Tuple[ProjPoint, ProjPoint, ProjPoint]] = None
    failed: Tuple[str, ...] = ()

    @property
    def holds(self) -> bool:
        return self.applicable and any(self.cases.values())

    def to_dict(self) -> Dict:
        return {
            "applicable": self.applicable,
            "m_minus_d": self.excess,
            "cases": dict(self.cases),
            "holds": self.holds,
            "choice": [p.to_strings() for p in self.choice] if self.choice else None,
            "failed": list(self.failed),
        }


def structure_check(arr: LineArrangement, analysis: Optional[TypeAnalysis] = None) -> StructureReport:
    """
    Evaluate the cases for the value of m; ``analysis`` defaults to the one of
    ``arr``'s own type. ``failed`` names the clauses missed by the closest
    choice when no case holds.
    """
    t = type_of_arrangement(arr)
    try:
        analysis = analysis or analyze(t)
    except PencilCaseError:
        return StructureReport(False, None)
    excess = analysis.m - arr.d
    if excess not in CASES:
        return StructureReport(False, excess)

    sing = arr.singular_points()
    p0, m0 = sing[0]
    m1, m2 = t.m(1), t.m(2)
    target = analysis.m - m0
    choices = [
        (q1, q2)
        for (q1, a), (q2, b) in permutations(sing[1:], 2)
        if (a, b) == (m1, m2) and a + b == target
    ]
    if not choices:
        return StructureReport(True, excess, {rule.name: False for rule in CASES[excess]}, None, ("multiplicities of P1, P2",))

    cases = {rule.name: False for rule in CASES[excess]}
    witness: Optional[Tuple[ProjPoint, ProjPoint, ProjPoint]] = None
    best: Tuple[int, Tuple[str, ...]] = (10, ())
    for q1, q2 in choices:
        placement = _place(arr, (p0, q1, q2), sing)
        for rule in CASES[excess]:
            clauses = placement.clauses(rule)
            failed = tuple(f"{rule.name}: {name}" for name, ok in clauses.items() if not ok)
            if not failed:
                if witness is None:
                    witness = placement.points
                cases[rule.name] = True
            elif len(failed) < best[0]:
                best = (len(failed), failed)
        if all(cases.values()):
            break

    report = StructureReport(True, excess, cases, witness, () if any(cases.values()) else best[1])
    if not report.holds:
        logger.warning(f"structure check for {t} (m = d+{excess}) fails: {', '.join(report.failed)}")
    return report
