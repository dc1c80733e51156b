"""
Plane Cremona maps as triples of forms with an explicit inverse.

Responsibilities:
- Build quadratic maps (three proper base points, or two proper points and
  one infinitely near point), de Jonquieres maps and maps given by a
  homaloidal net
- Verify birationality: forward o inverse must be a multiple of the identity
- Check the homaloidal identities on the base points
- Serialize to and from ``CremonaMapDoc``

Maps act X -> [F0(X) : F1(X) : F2(X)]. ``exceptional`` lists the curves of the
image plane contracted by the inverse; dividing them out of f(inverse) gives
the strict transform of f.
"""

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from src.models.errors import BirationalityError, DegenerateInputError, InadmissibleBaseSchemeError
from src.models.schemas import BasePointDoc, CremonaMapDoc, FormDoc
from src.services.geometry.polynomial import (
    HomPoly,
    exponents_of_degree,
    jacobian_determinant,
    gcd_many,
)
from src.services.geometry.projective import (
    ProjLine,
    ProjPoint,
    Projectivity,
    collinear,
    cross,
    incident,
    join,
    primitive_integer,
)
from src.services.linear_systems.ranks import exact_nullspace, exact_rank, rational_rows_to_integer
from src.services.linear_systems.system import LinearSystemSpec, system_basis

logger = logging.getLogger(__name__)

Forms = Tuple[HomPoly, HomPoly, HomPoly]

SYMBOLIC_CHECK_MAX_DEGREE = 4
RANDOM_CHECKS = 6


@dataclass(frozen=True)
class BasePoint:
    """A base point; ``direction`` set means the point infinitely near ``point`` along it."""

    point: ProjPoint
    multiplicity: int
    direction: Optional[ProjLine] = None

    @property
    def infinitely_near(self) -> bool:
        return self.direction is not None

    def to_doc(self) -> BasePointDoc:
        return BasePointDoc(
            point=self.point.to_strings(),
            multiplicity=self.multiplicity,
            direction=self.direction.to_strings() if self.direction else None,
        )

    @classmethod
    def from_doc(cls, doc: BasePointDoc) -> "BasePoint":
        direction = ProjLine.from_strings(doc.direction) if doc.direction else None
        return cls(ProjPoint.from_strings(doc.point), doc.multiplicity, direction)

    def __str__(self) -> str:
        if self.direction:
            return f"{self.point}->{self.direction} (x{self.multiplicity})"
        return f"{self.point} (x{self.multiplicity})"


def tangent_frame(point: ProjPoint, direction: ProjLine, other: Optional[ProjPoint] = None) -> Projectivity:
    """T with T(point) = e3, T(direction) = {y = 0} and T(other) = e2 when given."""
    s = next(q for q in direction.point_pair() if q != point)
    if other is None:
        candidates = [ProjPoint.of(1, 0, 0), ProjPoint.of(0, 1, 0), ProjPoint.of(0, 0, 1), ProjPoint.of(1, 1, 1)]
        other = next(q for q in candidates if not incident(q, direction))
    return Projectivity.frame(s, other, point).inverse()


def tangent_multiplicity(f: HomPoly, point: ProjPoint, direction: ProjLine, assigned: Optional[int] = None) -> int:
    """
    Multiplicity at the point infinitely near ``point`` along ``direction``.

    Without ``assigned`` this is the strict transform of f; with it, the
    virtual transform that subtracts ``assigned`` copies of the exceptional line.
    """
    g = f.linear_change(tangent_frame(point, direction).inverse())
    mu = min(i + j for i, j, _ in g.terms) if assigned is None else assigned
    return min(i + 2 * j for i, j, _ in g.terms) - mu


def multiplicity_at_base_point(f: HomPoly, bp: BasePoint, assigned: Optional[int] = None) -> int:
    if bp.direction is not None:
        return tangent_multiplicity(f, bp.point, bp.direction, assigned)
    return f.multiplicity_at(bp.point)


def _compose_linear(left: Projectivity, forms: Sequence[HomPoly]) -> Forms:
    """left o forms: the i-th output is sum_j left[i][j] * forms[j]."""
    out = []
    for row in left.rows:
        total = HomPoly.zero(forms[0].degree)
        for coeff, form in zip(row, forms):
            if coeff != 0:
                total = total + form.scale(coeff)
        out.append(total)
    return tuple(out)  # type: ignore[return-value]


def _precompose(forms: Sequence[HomPoly], right: Projectivity) -> Forms:
    """forms o right."""
    return tuple(f.linear_change(right) for f in forms)  # type: ignore[return-value]


def _evaluate(forms: Sequence[HomPoly], v: Sequence[Fraction]) -> Tuple[Fraction, Fraction, Fraction]:
    return tuple(f.evaluate(v) for f in forms)  # type: ignore[return-value]


class CremonaMap:
    """A birational plane map with its inverse, base points and exceptional curves."""

    def __init__(
        self,
        kind: str,
        forward: Sequence[HomPoly],
        inverse: Sequence[HomPoly],
        base_points: Sequence[BasePoint],
        exceptional: Optional[Sequence[HomPoly]] = None,
        label: str = "",
    ):
        if len(forward) != 3 or len(inverse) != 3:
            raise DegenerateInputError("a plane map has three coordinate forms")
        degrees = {f.degree for f in forward if not f.is_zero()}
        inv_degrees = {f.degree for f in inverse if not f.is_zero()}
        if len(degrees) != 1 or len(inv_degrees) != 1:
            raise DegenerateInputError("coordinate forms of a map must share one degree")
        self.kind = kind
        self.degree = degrees.pop()
        self.inverse_degree = inv_degrees.pop()
        self.forward: Forms = tuple(f if not f.is_zero() else HomPoly.zero(self.degree) for f in forward)  # type: ignore[assignment]
        self.inverse: Forms = tuple(f if not f.is_zero() else HomPoly.zero(self.inverse_degree) for f in inverse)  # type: ignore[assignment]
        self.base_points: Tuple[BasePoint, ...] = tuple(base_points)
        if exceptional is None:
            exceptional = [factor for factor, _ in jacobian_determinant(*self.inverse).factor_list()]
        self.exceptional: Tuple[HomPoly, ...] = tuple(exceptional)
        self.label = label or kind

    # ------------------------------------------------------------------
    # evaluation

    def evaluate(self, p: ProjPoint) -> Optional[ProjPoint]:
        """Image of p, or None when p is a base point."""
        values = _evaluate(self.forward, p.coords)
        if all(v == 0 for v in values):
            return None
        return ProjPoint(values)

    def evaluate_inverse(self, p: ProjPoint) -> Optional[ProjPoint]:
        values = _evaluate(self.inverse, p.coords)
        if all(v == 0 for v in values):
            return None
        return ProjPoint(values)

    def is_base_point(self, p: ProjPoint) -> bool:
        return all(f.evaluate(p) == 0 for f in self.forward)

    def proper_base_points(self) -> List[BasePoint]:
        return [bp for bp in self.base_points if not bp.infinitely_near]

    # ------------------------------------------------------------------
    # verification

    def homaloidal_ok(self) -> bool:
        n = self.degree
        mults = [bp.multiplicity for bp in self.base_points]
        return sum(m * m for m in mults) == n * n - 1 and sum(mults) == 3 * n - 3

    def verify(self, symbolic: Optional[bool] = None) -> None:
        """
        Raises:
            BirationalityError: a failed identity, named in the message.
        """
        if not self.homaloidal_ok():
            raise BirationalityError(f"{self.label}: base points violate the homaloidal identities")
        if not gcd_many(self.forward).is_constant():
            raise BirationalityError(f"{self.label}: forward forms share a factor")
        proper = {bp.point: bp.multiplicity for bp in self.proper_base_points()}
        for bp in self.base_points:
            assigned = proper.get(bp.point, 0) if bp.infinitely_near else None
            for f in self.forward:
                if not f.is_zero() and multiplicity_at_base_point(f, bp, assigned) < bp.multiplicity:
                    raise BirationalityError(f"{self.label}: forward forms do not pass through {bp}")
        if symbolic is None:
            symbolic = self.degree * self.inverse_degree <= SYMBOLIC_CHECK_MAX_DEGREE**2
        if symbolic:
            self._check_composition_symbolic()
        self._check_composition_at_points()
        jac = jacobian_determinant(*self.inverse)
        for curve in self.exceptional:
            if jac.is_zero() or jac.divide_out(curve)[1] == 0:
                raise BirationalityError(f"{self.label}: exceptional curve {curve} is not contracted by the inverse")

    def _check_composition_symbolic(self) -> None:
        comp = [f.substitute(*self.inverse) for f in self.forward]
        if all(c.is_zero() for c in comp):
            raise BirationalityError(f"{self.label}: forward o inverse vanishes identically")
        variables = [HomPoly.variable(i) for i in range(3)]
        for i in range(3):
            for j in range(i + 1, 3):
                if comp[i] * variables[j] != comp[j] * variables[i]:
                    raise BirationalityError(f"{self.label}: forward o inverse is not a multiple of the identity")

    def _check_composition_at_points(self) -> None:
        rng = random.Random(104729 + self.degree)
        checked = 0
        attempts = 0
        while checked < RANDOM_CHECKS and attempts < 10 * RANDOM_CHECKS:
            attempts += 1
            v = tuple(Fraction(rng.randint(-97, 97)) for _ in range(3))
            if all(c == 0 for c in v):
                continue
            w = _evaluate(self.inverse, v)
            if all(c == 0 for c in w):
                continue
            u = _evaluate(self.forward, w)
            if all(c == 0 for c in u):
                continue
            if any(c != 0 for c in cross(u, v)):
                raise BirationalityError(f"{self.label}: forward(inverse(v)) != v at v = {v}")
            checked += 1
        if checked == 0:
            raise BirationalityError(f"{self.label}: no point to test the composition on")

    # ------------------------------------------------------------------
    # serialization

    def to_doc(self) -> CremonaMapDoc:
        def form_doc(f: HomPoly) -> FormDoc:
            return FormDoc(degree=f.degree, terms=f.to_strings())

        return CremonaMapDoc(
            kind=self.kind,  # type: ignore[arg-type]
            degree=self.degree,
            base_points=[bp.to_doc() for bp in self.base_points],
            forward=[form_doc(f) for f in self.forward],
            inverse=[form_doc(f) for f in self.inverse],
            exceptional=[form_doc(f) for f in self.exceptional],
        )

    @classmethod
    def from_doc(cls, doc: CremonaMapDoc, label: str = "") -> "CremonaMap":
        def form(d: FormDoc) -> HomPoly:
            return HomPoly.from_strings(d.degree, d.terms)

        return cls(
            doc.kind,
            [form(f) for f in doc.forward],
            [form(f) for f in doc.inverse],
            [BasePoint.from_doc(bp) for bp in doc.base_points],
            [form(f) for f in doc.exceptional] if doc.exceptional else None,
            label=label,
        )

    def __repr__(self) -> str:
        points = ", ".join(str(bp) for bp in self.base_points)
        return f"CremonaMap({self.label}, degree {self.degree}, base points {points})"


# ----------------------------------------------------------------------
# constructors

_STANDARD = (
    HomPoly(2, {(0, 1, 1): 1}),
    HomPoly(2, {(1, 0, 1): 1}),
    HomPoly(2, {(1, 1, 0): 1}),
)


def quadratic_map(p: ProjPoint, q: ProjPoint, r: ProjPoint, label: str = "") -> CremonaMap:
    """The standard quadratic involution conjugated to have base points p, q, r."""
    if len({p, q, r}) < 3:
        raise DegenerateInputError(f"coincident base points among {p}, {q}, {r}")
    if collinear(p, q, r):
        raise DegenerateInputError(f"collinear base points {p}, {q}, {r}")
    A = Projectivity.frame(p, q, r)
    forms = _compose_linear(A, _precompose(_STANDARD, A.inverse()))
    # the line qr is contracted to p (and so on), on both sides
    exceptional = [HomPoly.from_line(join(q, r)), HomPoly.from_line(join(r, p)), HomPoly.from_line(join(p, q))]
    cmap = CremonaMap(
        "quadratic",
        forms,
        forms,
        [BasePoint(p, 1), BasePoint(q, 1), BasePoint(r, 1)],
        exceptional,
        label=label or f"quadratic at {p}, {q}, {r}",
    )
    cmap.verify()
    return cmap


_TANGENT_FORWARD = (
    HomPoly(2, {(2, 0, 0): 1}),
    HomPoly(2, {(1, 1, 0): 1}),
    HomPoly(2, {(0, 1, 1): 1}),
)
_TANGENT_INVERSE = (
    HomPoly(2, {(1, 1, 0): 1}),
    HomPoly(2, {(0, 2, 0): 1}),
    HomPoly(2, {(1, 0, 1): 1}),
)


def quadratic_map_tangent(p: ProjPoint, direction: ProjLine, r: ProjPoint, label: str = "") -> CremonaMap:
    """
    Quadratic map of the net of conics through p, tangent there to ``direction``,
    and through r.

    Raises:
        DegenerateInputError: r on ``direction``, r = p, or ``direction`` missing p.
    """
    if not incident(p, direction):
        raise DegenerateInputError(f"direction {direction} does not pass through {p}")
    if r == p or incident(r, direction):
        raise DegenerateInputError(f"third base point {r} lies on the tangent direction")
    T = tangent_frame(p, direction, r)
    forward = _precompose(_TANGENT_FORWARD, T)
    inverse = _compose_linear(T.inverse(), _TANGENT_INVERSE)
    exceptional = [HomPoly.variable(0), HomPoly.variable(1)]
    cmap = CremonaMap(
        "tangent_quadratic",
        forward,
        inverse,
        [BasePoint(p, 1), BasePoint(p, 1, direction), BasePoint(r, 1)],
        exceptional,
        label=label or f"tangent quadratic at {p} along {direction}, {r}",
    )
    cmap.verify()
    return cmap


def _binary_part(form: HomPoly, z_power: int) -> HomPoly:
    """Coefficient of z^z_power in ``form`` as a binary form."""
    terms = {(i, j, 0): c for (i, j, k), c in form.terms.items() if k == z_power}
    return HomPoly(form.degree - z_power, terms) if terms else HomPoly.zero(form.degree - z_power)


def _solve_affine_in_z(points: Sequence[Tuple[int, int, int]], degree: int) -> Tuple[List[Tuple[int, int, int]], List[List[Fraction]]]:
    """Forms of ``degree`` with z-exponent <= 1 through ``points``: (basis, nullspace)."""
    basis = [e for e in exponents_of_degree(degree) if e[2] <= 1]
    rows = []
    for a, b, c in points:
        rows.append([a**i * b**j * c**k for i, j, k in basis])
    return basis, exact_nullspace(rows, len(basis))


def dejonquieres_map(center: ProjPoint, simples: Sequence[ProjPoint], label: str = "") -> CremonaMap:
    """
    De Jonquieres map of degree n with a point of multiplicity n-1 at ``center``
    and simple base points at the 2n-2 given points.

    In coordinates with the center at [0:0:1] the map is [x h : y h : g] with
    h = c z + e and g = a z + b; the inverse is [x h* : y h* : g*] with
    h* = c z - a and g* = b - e z, and forward o inverse = -h*^(n-1) (ae - bc) id.

    Raises:
        DegenerateInputError: n = 1, odd count of points, or repeated points.
        InadmissibleBaseSchemeError: the points do not define a homaloidal net.
    """
    if len(simples) < 2 or len(simples) % 2:
        raise DegenerateInputError(f"a de Jonquieres map needs 2n-2 >= 2 simple points, got {len(simples)}")
    if len(set(simples)) != len(simples) or center in simples:
        raise DegenerateInputError("repeated base points")
    n = len(simples) // 2 + 1
    T = Projectivity.centering(center)
    adapted = [primitive_integer(T.apply(s).coords) for s in simples]

    h_basis, h_null = _solve_affine_in_z(adapted, n - 1)
    if len(h_null) != 1:
        raise InadmissibleBaseSchemeError(f"the curves of degree {n - 1} through the points form a {len(h_null)}-dimensional family")
    H = HomPoly.from_coefficients(n - 1, h_basis, h_null[0])
    xH, yH = H * HomPoly.variable(0), H * HomPoly.variable(1)

    g_basis, g_null = _solve_affine_in_z(adapted, n)
    if len(g_null) != 3:
        raise InadmissibleBaseSchemeError(f"net of degree {n} has dimension {len(g_null) - 1}, expected 2")
    span_rows = [[xH.terms.get(e, Fraction(0)) for e in g_basis], [yH.terms.get(e, Fraction(0)) for e in g_basis]]
    G = None
    for vec in g_null:
        if exact_rank(rational_rows_to_integer(span_rows + [vec]), len(g_basis)) == 3:
            G = HomPoly.from_coefficients(n, g_basis, vec)
            break
    if G is None:
        raise InadmissibleBaseSchemeError("no net member outside the pencil part")

    c, e = _binary_part(H, 1), _binary_part(H, 0)
    a, b = _binary_part(G, 1), _binary_part(G, 0)
    delta = a * e - b * c
    if delta.is_zero():
        raise InadmissibleBaseSchemeError()
    z = HomPoly.variable(2)
    h_star = c * z - a
    g_star = b - e * z

    forward = _precompose((xH, yH, G), T)
    inverse = _compose_linear(T.inverse(), (h_star * HomPoly.variable(0), h_star * HomPoly.variable(1), g_star))
    exceptional = [f for f, _ in h_star.factor_list()] + [f for f, _ in delta.factor_list()]
    base = [BasePoint(center, n - 1)] + [BasePoint(s, 1) for s in simples]
    cmap = CremonaMap(
        "dejonquieres",
        forward,
        inverse,
        base,
        exceptional,
        label=label or f"de Jonquieres degree {n} at {center}",
    )
    cmap.verify()
    logger.debug(f"built {cmap!r}")
    return cmap


def map_from_net(
    forms: Sequence[HomPoly],
    base_points: Sequence[BasePoint],
    inverse_degree: int,
    label: str = "",
    seed: int = 1,
) -> CremonaMap:
    """
    Cremona map given by a homaloidal net; the inverse of degree ``inverse_degree``
    solves G_i(F(X)) X_j = G_j(F(X)) X_i, sampled at integer points and then
    verified symbolically.

    Raises:
        BirationalityError: the net is not homaloidal.
    """
    if len(forms) != 3:
        raise InadmissibleBaseSchemeError(f"a net needs three forms, got {len(forms)}")
    exps = exponents_of_degree(inverse_degree)
    N = len(exps)
    rng = random.Random(seed * 31337 + inverse_degree)
    rows: List[List[int]] = []
    while len(rows) < 3 * N + 24:
        v = [rng.randint(-60, 60) for _ in range(3)]
        w = _evaluate(forms, [Fraction(c) for c in v])
        if all(c == 0 for c in w):
            continue
        w_int = primitive_integer(w)
        monos = [w_int[0] ** i * w_int[1] ** j * w_int[2] ** k for i, j, k in exps]
        for i, j in ((0, 1), (0, 2), (1, 2)):
            row = [0] * (3 * N)
            for col, mono in enumerate(monos):
                row[i * N + col] = mono * v[j]
                row[j * N + col] = -mono * v[i]
            rows.append(row)
    null = exact_nullspace(rows, 3 * N)
    if len(null) != 1:
        raise BirationalityError(f"net inverse of degree {inverse_degree}: solution space of dimension {len(null)}")
    vec = null[0]
    inverse = [HomPoly.from_coefficients(inverse_degree, exps, vec[i * N : (i + 1) * N]) for i in range(3)]
    cmap = CremonaMap("net", forms, inverse, base_points, None, label=label or "map of a homaloidal net")
    cmap.verify(symbolic=True)
    return cmap


def quartic_map(doubles: Sequence[ProjPoint], simples: Sequence[ProjPoint], label: str = "") -> CremonaMap:
    """Map of the net of quartics with three double points and three simple base points."""
    if len(doubles) != 3 or len(simples) != 3:
        raise DegenerateInputError("the quartic net needs three double and three simple points")
    spec = LinearSystemSpec.build(4, [(p, 2) for p in doubles] + [(p, 1) for p in simples])
    basis = system_basis(spec)
    if len(basis) != 3:
        raise InadmissibleBaseSchemeError(f"quartic system has dimension {len(basis) - 1}, expected 2")
    base = [BasePoint(p, 2) for p in doubles] + [BasePoint(p, 1) for p in simples]
    return map_from_net(basis, base, 4, label=label or "quartic net with three double points")


def identity_map() -> CremonaMap:
    variables = [HomPoly.variable(i) for i in range(3)]
    return CremonaMap("net", variables, variables, [], [], label="identity")
