"""
Linear systems of plane curves with assigned base points.

A system is the space of degree-D forms vanishing to order >= mu_i at points
P_i, optionally with one infinitely near condition (a point, a direction
through it and an order along that direction). Dimensions are projective;
-1 means empty.

Responsibilities:
- Exact reductions that never change the system: a line carrying more
  conditions than the degree is a fixed component and is split off; a point
  of multiplicity equal to the degree makes the system a cone
- Interpolation matrices in coordinates adapted to the heaviest points, so
  their conditions become monomial restrictions instead of rows
- Modular rank as a filter, exact rational nullspace for nonempty verdicts
  and for witnesses
- Memoisation of results in the shared CacheService
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from src.models.config import Config
from src.models.errors import DegenerateInputError, WitnessError
from src.models.schemas import FormDoc, LineFactorDoc, WitnessDoc
from src.services.cache.cache_service import CacheService, get_cache
from src.services.geometry.polynomial import Exponent, HomPoly, exponents_of_degree, falling
from src.services.geometry.projective import (
    ProjLine,
    ProjPoint,
    Projectivity,
    collinear,
    incident,
    join,
)
from src.services.linear_systems.ranks import exact_nullspace, rank_mod, to_mod_array

logger = logging.getLogger(__name__)

# auxiliary frame points, tried in order when the conditions do not span a frame
_AUX_POINTS = [
    ProjPoint.of(1, 0, 0),
    ProjPoint.of(0, 1, 0),
    ProjPoint.of(0, 0, 1),
    ProjPoint.of(1, 1, 1),
    ProjPoint.of(1, 2, 3),
    ProjPoint.of(3, -5, 7),
    ProjPoint.of(2, 7, -11),
]


@dataclass(frozen=True)
class TangentCondition:
    """Vanishing of ``order`` at the point infinitely near ``point`` in ``direction``."""

    point: ProjPoint
    direction: ProjLine
    order: int = 1

    def __post_init__(self):
        if not incident(self.point, self.direction):
            raise DegenerateInputError(f"direction {self.direction} does not pass through {self.point}")
        if self.order < 1:
            raise DegenerateInputError("tangent order must be positive")


@dataclass(frozen=True)
class LinearSystemSpec:
    """Degree D forms with multiplicity >= mu at each listed point."""

    degree: int
    conditions: Tuple[Tuple[ProjPoint, int], ...] = ()
    tangent: Optional[TangentCondition] = None

    def __post_init__(self):
        seen = set()
        for p, mu in self.conditions:
            if mu < 1:
                raise DegenerateInputError(f"multiplicity {mu} at {p} is not positive")
            if p in seen:
                raise DegenerateInputError(f"point {p} listed twice")
            seen.add(p)
        object.__setattr__(self, "conditions", tuple(self.conditions))

    @classmethod
    def build(
        cls,
        degree: int,
        conditions: Sequence[Tuple[ProjPoint, int]],
        tangent: Optional[TangentCondition] = None,
    ) -> "LinearSystemSpec":
        """Drop non-positive multiplicities and sort the points."""
        kept = sorted(((p, int(mu)) for p, mu in conditions if mu > 0), key=lambda pm: (-pm[1], pm[0]))
        return cls(degree, tuple(kept), tangent)

    def multiplicity(self, p: ProjPoint) -> int:
        for q, mu in self.conditions:
            if q == p:
                return mu
        return 0

    def render(self) -> str:
        mults = [mu for _, mu in self.conditions]
        groups: List[Tuple[int, int]] = []
        for mu in mults:
            if groups and groups[-1][0] == mu:
                groups[-1] = (mu, groups[-1][1] + 1)
            else:
                groups.append((mu, 1))
        body = ", ".join(f"{mu}^{count}" if count > 1 else str(mu) for mu, count in groups)
        extra = f" + tangent order {self.tangent.order}" if self.tangent else ""
        return f"({self.degree}; {body}){extra}"

    def cache_payload(self) -> Dict:
        payload = {
            "degree": self.degree,
            "conditions": sorted([list(p.integer_coords), mu] for p, mu in self.conditions),
        }
        if self.tangent:
            payload["tangent"] = [
                list(self.tangent.point.integer_coords),
                list(self.tangent.direction.integer_coeffs),
                self.tangent.order,
            ]
        return payload

    def is_satisfied_by(self, form: Union[HomPoly, "FactoredForm"]) -> bool:
        if isinstance(form, HomPoly):
            form = FactoredForm((), form)
        if form.degree != self.degree or form.is_zero():
            return False
        for p, mu in self.conditions:
            if form.multiplicity_at(p) < mu:
                return False
        if self.tangent:
            return _satisfies_tangent(form.expand(), self.tangent, self.multiplicity(self.tangent.point))
        return True


def virtual_dim(spec: LinearSystemSpec) -> int:
    """D(D+3)/2 - sum mu(mu+1)/2, unclamped."""
    d = spec.degree
    total = d * (d + 3) // 2 - sum(mu * (mu + 1) // 2 for _, mu in spec.conditions)
    if spec.tangent:
        total -= spec.tangent.order * (spec.tangent.order + 1) // 2
    return total


@dataclass(frozen=True)
class FactoredForm:
    """A form given as a product of lines (with multiplicity) times a residual form."""

    line_factors: Tuple[Tuple[ProjLine, int], ...]
    residual: HomPoly

    @property
    def degree(self) -> int:
        return sum(mult for _, mult in self.line_factors) + self.residual.degree

    def is_zero(self) -> bool:
        return self.residual.is_zero()

    def multiplicity_at(self, p: ProjPoint) -> int:
        mult = sum(k for line, k in self.line_factors if incident(p, line))
        if self.residual.degree > 0:
            mult += self.residual.multiplicity_at(p)
        return mult

    def expand(self) -> HomPoly:
        out = self.residual
        for line, k in self.line_factors:
            out = out * HomPoly.from_line(line) ** k
        return out

    def times_lines(self, extra: Dict[ProjLine, int]) -> "FactoredForm":
        merged: Dict[ProjLine, int] = defaultdict(int)
        for line, k in self.line_factors:
            merged[line] += k
        for line, k in extra.items():
            if k > 0:
                merged[line] += k
        return FactoredForm(tuple(sorted(merged.items())), self.residual)

    def to_doc(self, n: int, m: int, description: str, roles: Optional[Dict[ProjLine, str]] = None) -> WitnessDoc:
        roles = roles or {}
        return WitnessDoc(
            n=n,
            m=m,
            degree=self.degree,
            line_factors=[
                LineFactorDoc(line=line.to_strings(), multiplicity=k, role=roles.get(line, "fixed"))
                for line, k in self.line_factors
            ],
            residual=FormDoc(degree=self.residual.degree, terms=self.residual.to_strings()),
            description=description,
        )

    @classmethod
    def from_doc(cls, doc: WitnessDoc) -> "FactoredForm":
        return cls(
            tuple((ProjLine.from_strings(f.line), f.multiplicity) for f in doc.line_factors),
            HomPoly.from_strings(doc.residual.degree, doc.residual.terms),
        )

    def __str__(self) -> str:
        parts = [f"({line})^{k}" if k > 1 else f"({line})" for line, k in self.line_factors]
        if not self.residual.is_constant():
            parts.append(f"[{self.residual}]")
        return " * ".join(parts) if parts else str(self.residual)


@dataclass(frozen=True)
class LinearSystemResult:
    dim: int
    method: str
    witness: Optional[FactoredForm] = None
    fixed_lines: Tuple[Tuple[ProjLine, int], ...] = field(default=())

    @property
    def empty(self) -> bool:
        return self.dim < 0


# ----------------------------------------------------------------------
# reductions


def _lines_through_pairs(points: Sequence[ProjPoint]) -> List[Tuple[ProjLine, Tuple[ProjPoint, ...]]]:
    lines: Dict[ProjLine, set] = {}
    for i, p in enumerate(points):
        for q in points[i + 1 :]:
            line = join(p, q)
            if line not in lines:
                lines[line] = {r for r in points if incident(r, line)}
    return [(line, tuple(sorted(pts))) for line, pts in sorted(lines.items())]


def _pencil_line(p: ProjPoint, avoid: Sequence[ProjLine] = ()) -> ProjLine:
    for q in _AUX_POINTS:
        if q != p and join(p, q) not in avoid:
            return join(p, q)
    raise DegenerateInputError(f"no auxiliary line through {p}")  # pragma: no cover


def _cone(degree: int, conds: Dict[ProjPoint, int], apex: ProjPoint, want_witness: bool):
    """Degree-D forms with multiplicity D at ``apex``: binary forms on the pencil there."""
    roots: Dict[ProjLine, int] = {}
    for q, mu in conds.items():
        if q == apex:
            continue
        line = join(apex, q)
        roots[line] = max(roots.get(line, 0), mu)
    dim = degree - sum(roots.values())
    if dim < 0:
        return -1, None
    if not want_witness:
        return dim, None
    factors = dict(roots)
    free = degree - sum(roots.values())
    if free:
        aux = _pencil_line(apex, tuple(factors))
        factors[aux] = factors.get(aux, 0) + free
    return dim, FactoredForm(tuple(sorted(factors.items())), HomPoly.constant(1))


# ----------------------------------------------------------------------
# interpolation


def _adapted_frame(conds: Dict[ProjPoint, int]) -> Tuple[Projectivity, Tuple[int, int, int]]:
    """
    T sending the heaviest points to e3, e2, e1 and their multiplicities.

    Returns (T, (mu at e1, mu at e2, mu at e3)).
    """
    ranked = sorted(conds.items(), key=lambda pm: (-pm[1], pm[0]))
    chosen: List[Tuple[ProjPoint, int]] = []
    for p, mu in ranked + [(q, 0) for q in _AUX_POINTS]:
        if len(chosen) == 3:
            break
        if mu == 0 and p in conds:
            continue
        if any(p == c for c, _ in chosen):
            continue
        if len(chosen) == 2 and collinear(chosen[0][0], chosen[1][0], p):
            continue
        chosen.append((p, mu))
    (pa, mua), (pb, mub), (pc, muc) = chosen
    T = Projectivity.frame(pc, pb, pa).inverse()
    return T, (muc, mub, mua)


def _tangent_frame(
    conds: Dict[ProjPoint, int], tangent: TangentCondition
) -> Tuple[Projectivity, int, int, int]:
    """T with T(p) = e3 and T(direction) = {y = 0}; returns (T, mu_p, mu at e1, mu at e2)."""
    p, direction = tangent.point, tangent.direction
    ranked = sorted(conds.items(), key=lambda pm: (-pm[1], pm[0]))
    on_dir = [(q, mu) for q, mu in ranked if q != p and incident(q, direction)]
    off_dir = [(q, mu) for q, mu in ranked if not incident(q, direction)]
    if on_dir:
        s, mu_s = on_dir[0]
    else:
        s = next(q for q in direction.point_pair() + tuple(_AUX_POINTS) if q != p and incident(q, direction) and q not in conds)
        mu_s = 0
    if off_dir:
        r, mu_r = off_dir[0]
    else:
        r = next(q for q in _AUX_POINTS if not incident(q, direction) and q not in conds)
        mu_r = 0
    T = Projectivity.frame(s, r, p).inverse()
    return T, conds.get(p, 0), mu_s, mu_r


def _satisfies_tangent(form: HomPoly, tangent: TangentCondition, mu_p: int) -> bool:
    T, _, _, _ = _tangent_frame({}, tangent)
    adapted = form.linear_change(T.inverse())
    return all(i + j >= mu_p and i + 2 * j >= mu_p + tangent.order for (i, j, _), _c in adapted.terms.items())


def _condition_rows(basis: Sequence[Exponent], point: Tuple[int, int, int], mu: int) -> List[List[int]]:
    """Order mu-1 partial derivatives of each basis monomial at an integer point."""
    a, b, c = point
    top = max((max(e) for e in basis), default=0)
    powers = [[v**e for e in range(top + 1)] for v in (a, b, c)]
    rows = []
    order = mu - 1
    for alpha in range(order, -1, -1):
        for beta in range(order - alpha, -1, -1):
            gamma = order - alpha - beta
            row = []
            for i, j, k in basis:
                if i < alpha or j < beta or k < gamma:
                    row.append(0)
                    continue
                row.append(
                    falling(i, alpha)
                    * falling(j, beta)
                    * falling(k, gamma)
                    * powers[0][i - alpha]
                    * powers[1][j - beta]
                    * powers[2][k - gamma]
                )
            rows.append(row)
    return rows


def _interpolation_matrix(
    degree: int,
    conds: Dict[ProjPoint, int],
    tangent: Optional[TangentCondition],
) -> Tuple[Projectivity, List[Exponent], List[List[int]]]:
    """Adapted frame T, allowed monomials and the remaining condition rows."""
    if tangent is None:
        T, (mu1, mu2, mu3) = _adapted_frame(conds)
        basis = [
            (i, j, k)
            for i, j, k in exponents_of_degree(degree)
            if i + j >= mu3 and i + k >= mu2 and j + k >= mu1
        ]
    else:
        T, mu_p, mu_s, mu_r = _tangent_frame(conds, tangent)
        basis = [
            (i, j, k)
            for i, j, k in exponents_of_degree(degree)
            if i + j >= mu_p and i + 2 * j >= mu_p + tangent.order and j + k >= mu_s and i + k >= mu_r
        ]
    frame_points = {T.inverse().apply(e) for e in _AUX_POINTS[:3]}
    rows: List[List[int]] = []
    if basis:
        for q, mu in conds.items():
            if q in frame_points:
                continue
            rows.extend(_condition_rows(basis, T.apply(q).integer_coords, mu))
    return T, basis, rows


def _interpolate(
    degree: int,
    conds: Dict[ProjPoint, int],
    tangent: Optional[TangentCondition],
    want_witness: bool,
) -> Tuple[int, Optional[HomPoly], str]:
    T, basis, rows = _interpolation_matrix(degree, conds, tangent)
    if not basis:
        return -1, None, "monomial"

    ncols = len(basis)
    la_config = Config.get_linear_algebra_config()
    prime = la_config["prime"]
    if rows:
        rank_p = rank_mod(to_mod_array(rows, ncols, prime), prime)
        logger.debug(f"interpolation {len(rows)}x{ncols}: rank mod p = {rank_p}")
        if rank_p == ncols:
            return -1, None, "modular-rank"
        if not (la_config["exact_confirm"] or want_witness):
            return ncols - rank_p - 1, None, "modular-rank"
    null = exact_nullspace(rows, ncols)
    if not null:
        return -1, None, "exact-rank"
    dim = len(null) - 1
    witness = None
    if want_witness:
        adapted = HomPoly.from_coefficients(degree, basis, null[0])
        witness = adapted.linear_change(T).normalized()
    return dim, witness, "exact-rank"


def system_basis(spec: LinearSystemSpec) -> List[HomPoly]:
    """A basis of the vector space of forms in the system (no reductions applied)."""
    if spec.degree < 0:
        return []
    T, basis, rows = _interpolation_matrix(spec.degree, dict(spec.conditions), spec.tangent)
    if not basis:
        return []
    null = exact_nullspace(rows, len(basis))
    return [HomPoly.from_coefficients(spec.degree, basis, vec).linear_change(T).normalized() for vec in null]


# ----------------------------------------------------------------------
# entry points


def _solve(spec: LinearSystemSpec, want_witness: bool) -> LinearSystemResult:
    degree = spec.degree
    conds: Dict[ProjPoint, int] = {p: mu for p, mu in spec.conditions}
    fixed: Dict[ProjLine, int] = defaultdict(int)

    def finish(dim: int, method: str, residual: Optional[FactoredForm]) -> LinearSystemResult:
        fixed_items = tuple(sorted((line, k) for line, k in fixed.items() if k))
        if dim < 0:
            return LinearSystemResult(-1, method, None, fixed_items)
        witness = residual.times_lines(dict(fixed)) if residual is not None else None
        return LinearSystemResult(dim, method, witness, fixed_items)

    if spec.tangent is not None:
        if degree < 0:
            return finish(-1, "degree", None)
        dim, form, method = _interpolate(degree, conds, spec.tangent, want_witness)
        return finish(dim, method, FactoredForm((), form) if form is not None else None)

    pool = _lines_through_pairs(sorted(conds))
    while True:
        conds = {p: mu for p, mu in conds.items() if mu > 0}
        if degree < 0:
            return finish(-1, "degree", None)
        if any(mu > degree for mu in conds.values()):
            return finish(-1, "multiplicity-exceeds-degree", None)
        if not conds:
            dim = degree * (degree + 3) // 2
            return finish(dim, "free", FactoredForm((), HomPoly.variable(2) ** degree))

        best: Optional[Tuple[int, ProjLine, Tuple[ProjPoint, ...]]] = None
        for line, pts in pool:
            excess = sum(conds.get(p, 0) for p in pts) - degree
            if excess > 0 and (best is None or excess > best[0]):
                best = (excess, line, pts)
        if best is not None:
            _, line, pts = best
            fixed[line] += 1
            degree -= 1
            for p in pts:
                if p in conds:
                    conds[p] -= 1
            continue

        apex = next((p for p, mu in sorted(conds.items()) if mu == degree), None)
        if apex is not None and degree >= 1:
            dim, cone_form = _cone(degree, conds, apex, want_witness)
            return finish(dim, "cone", cone_form)

        dim, form, method = _interpolate(degree, conds, None, want_witness)
        return finish(dim, method, FactoredForm((), form) if form is not None else None)


def solve_system(
    spec: LinearSystemSpec,
    want_witness: bool = False,
    cache: Optional[CacheService] = None,
) -> LinearSystemResult:
    """
    Dimension of the system, with a member when requested and nonempty.

    Raises:
        WitnessError: an extracted member fails its own conditions.
    """
    cache = cache or get_cache()
    payload = spec.cache_payload()
    cached = cache.lookup(payload, need_member=want_witness)
    if cached is not None:
        return cached

    result = _solve(spec, want_witness)
    logger.debug(f"system {spec.render()}: dim {result.dim} via {result.method}")
    if want_witness and result.witness is not None and not spec.is_satisfied_by(result.witness):
        logger.error(f"❌ Member of {spec.render()} fails its conditions")
        raise WitnessError(f"extracted member of {spec.render()} fails its conditions")
    cache.store(payload, result)
    return result


def actual_dim(spec: LinearSystemSpec) -> int:
    return solve_system(spec).dim
