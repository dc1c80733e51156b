"""
Images of curves under Cremona maps and under sequences of them.

Every component of a line arrangement is tracked through a sequence of maps
by a parametrization (three binary forms in s, t), reduced after each map by
the gcd of its coordinates. A constant parametrization means the component
has been contracted to a point. When a later map is based at such a point,
the component's image is recomputed from the original line through the
whole sequence on a first-order thickening s*P + t*Q + u*V, truncated in u.

The implicit equation of each surviving image is cross-checked against the
strict transform f(inverse) with the exceptional curves divided out, and the
degree formula deg(image) = n*deg - sum mult_p * mu_p is checked per component.
"""

import logging
import math
import random
from dataclasses import dataclass, field, replace
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from src.models.errors import CertificateError, DegenerateInputError
from src.models.schemas import ContractedDoc, FormDoc, ImageDoc, SurvivorDoc
from src.services.configuration.arrangement import LineArrangement
from src.services.cremona.maps import CremonaMap, multiplicity_at_base_point
from src.services.geometry.polynomial import (
    HomPoly,
    binary_param,
    divide_out,
    exponents_of_degree,
    gcd_many,
    substitute,
)
from src.services.geometry.projective import ProjLine, ProjPoint, incident, join, random_point
from src.services.linear_systems.ranks import exact_nullspace

logger = logging.getLogger(__name__)

Param = Tuple[HomPoly, HomPoly, HomPoly]

REPLAY_START_PRECISION = 4
REPLAY_MAX_PRECISION = 128


# ----------------------------------------------------------------------
# single curves


def push_forward(cmap: CremonaMap, f: HomPoly) -> Optional[HomPoly]:
    """
    Strict transform of f: f(inverse) with every exceptional curve divided
    out to its full multiplicity. None when f is contracted.
    """
    g = f.substitute(*cmap.inverse)
    if g.is_zero():
        raise DegenerateInputError(f"{f} vanishes on the image of {cmap.label}")
    for curve in cmap.exceptional:
        if g.degree < curve.degree:
            continue
        g, _ = divide_out(g, curve)
    if g.degree == 0:
        return None
    return g.normalized()


def map_param(forms: Sequence[HomPoly], param: Param) -> Param:
    """forms o param, divided by the gcd of its coordinates."""
    image = tuple(substitute(f, *param) for f in forms)
    if all(c.is_zero() for c in image):
        raise DegenerateInputError("parametrized curve lies in the base locus")
    return reduce_param(image)  # type: ignore[arg-type]


def reduce_param(param: Sequence[HomPoly]) -> Param:
    g = gcd_many(param)
    if g.degree == 0:
        return tuple(param)  # type: ignore[return-value]
    return tuple(c.exact_div(g) if not c.is_zero() else HomPoly.zero(c.degree - g.degree) for c in param)  # type: ignore[return-value]


def param_degree(param: Param) -> int:
    return max(c.degree for c in param if not c.is_zero())


def param_point(param: Param) -> ProjPoint:
    """The point of a constant parametrization."""
    return ProjPoint(tuple(c.terms.get((0, 0, 0), 0) if c.degree == 0 else 0 for c in param))


def implicit_equation(param: Param) -> HomPoly:
    """The reduced equation of the image of a parametrization of degree e >= 1."""
    e = param_degree(param)
    if e == 1:
        p = ProjPoint(tuple(c.evaluate((1, 0, 0)) for c in param))
        q = ProjPoint(tuple(c.evaluate((0, 1, 0)) for c in param))
        return HomPoly.from_line(join(p, q))
    exps = exponents_of_degree(e)
    columns = [substitute(HomPoly(e, {exp: 1}), *param) for exp in exps]
    binary = sorted({mono for col in columns for mono in col.terms})
    rows = [[int(0)] * len(exps) for _ in binary]
    index = {mono: r for r, mono in enumerate(binary)}
    # clear denominators column by column; scaling a column rescales the unknown only
    scales = []
    for j, col in enumerate(columns):
        lcm = 1
        for c in col.terms.values():
            lcm = math.lcm(lcm, c.denominator)
        scales.append(lcm)
        for mono, c in col.terms.items():
            rows[index[mono]][j] = int(c * lcm)
    null = exact_nullspace(rows, len(exps))
    if len(null) != 1:
        raise DegenerateInputError(f"parametrization of degree {e} is not birational onto its image")
    coeffs = [v * s for v, s in zip(null[0], scales)]
    return HomPoly.from_coefficients(e, exps, coeffs).normalized()


def form_line(eq: HomPoly) -> ProjLine:
    """The line of a degree-1 form."""
    if eq.degree != 1:
        raise DegenerateInputError(f"{eq} is not a line")
    return ProjLine(tuple(eq.terms.get(e, 0) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))))


def line_param(line: ProjLine) -> Param:
    p, q = line.point_pair()
    return binary_param(p, q)  # type: ignore[return-value]


# ----------------------------------------------------------------------
# thickened replay


def _split_u(form: HomPoly) -> Dict[int, HomPoly]:
    parts: Dict[int, Dict] = {}
    for (i, j, k), c in form.terms.items():
        parts.setdefault(k, {})[(i, j, 0)] = c
    return {k: HomPoly(form.degree - k, terms) for k, terms in parts.items()}


def _thickened_image(maps: Sequence[CremonaMap], line: ProjLine, v: ProjPoint, precision: int) -> Optional[Param]:
    p, q = line.point_pair()
    triple = tuple(HomPoly(1, {(1, 0, 0): p[i], (0, 1, 0): q[i], (0, 0, 1): v[i]}) for i in range(3))
    prec = precision
    for cmap in maps:
        triple = tuple(substitute(f, *triple, zmax=prec) for f in cmap.forward)
        if all(c.is_zero() for c in triple):
            return None
        shift = min(k for c in triple for (_, _, k) in c.terms)
        if shift:
            prec -= shift
            if prec <= 0:
                return None
            triple = tuple(
                HomPoly(c.degree - shift, {(i, j, k - shift): x for (i, j, k), x in c.terms.items()})
                if not c.is_zero()
                else HomPoly.zero(c.degree - shift)
                for c in triple
            )
        parts = [part for c in triple for part in _split_u(c).values()]
        g = gcd_many(parts)
        if g.degree:
            lifted = HomPoly(g.degree, g.terms)
            triple = tuple(c.exact_div(lifted) if not c.is_zero() else HomPoly.zero(c.degree - g.degree) for c in triple)
    base = [
        _split_u(c).get(0, HomPoly.zero(c.degree)) if not c.is_zero() else HomPoly.zero(c.degree)
        for c in triple
    ]
    return reduce_param(base)


def replay_param(maps: Sequence[CremonaMap], line: ProjLine, seed: int = 1) -> Param:
    """Parametrized image of ``line`` under the composite of ``maps``, applied in order."""
    rng = random.Random(seed * 65537 + len(maps))
    v = random_point(rng, 97)
    while incident(v, line):
        v = random_point(rng, 97)
    precision = REPLAY_START_PRECISION
    while precision <= REPLAY_MAX_PRECISION:
        result = _thickened_image(maps, line, v, precision)
        if result is not None:
            return result
        logger.debug(f"replay of {line}: precision {precision} exhausted, doubling")
        precision *= 2
    raise CertificateError(f"replay of {line} needs more than u^{REPLAY_MAX_PRECISION}")


# ----------------------------------------------------------------------
# tracked components


@dataclass(frozen=True)
class TrackedComponent:
    """The current image of one source line."""

    index: int
    source: ProjLine
    param: Param
    equation: Optional[HomPoly] = None
    point: Optional[ProjPoint] = None

    @classmethod
    def start(cls, index: int, line: ProjLine) -> "TrackedComponent":
        return cls(index, line, line_param(line), HomPoly.from_line(line), None)

    @property
    def contracted(self) -> bool:
        return self.point is not None

    @property
    def degree(self) -> int:
        return 0 if self.equation is None else self.equation.degree

    @classmethod
    def from_param(cls, index: int, source: ProjLine, param: Param) -> "TrackedComponent":
        if param_degree(param) == 0:
            return cls(index, source, param, None, param_point(param))
        return cls(index, source, param, implicit_equation(param), None)


@dataclass(frozen=True)
class CurveImage:
    """Survivors (equation, source index) and contracted components (source index, point)."""

    surviving: Tuple[Tuple[HomPoly, int], ...]
    contracted: Tuple[Tuple[int, ProjPoint], ...]
    degree_formula_ok: bool = True
    image_degree: int = 0
    expected_degree: int = 0
    components: Tuple[TrackedComponent, ...] = field(default=(), compare=False, repr=False)

    @property
    def all_contracted(self) -> bool:
        return not self.surviving

    def survivors_are_lines(self) -> bool:
        return all(eq.degree == 1 for eq, _ in self.surviving)

    def survivor_lines(self) -> List[ProjLine]:
        if not self.survivors_are_lines():
            raise DegenerateInputError("not every surviving component is a line")
        return [form_line(eq) for eq, _ in self.surviving]

    def as_arrangement(self) -> LineArrangement:
        return LineArrangement(tuple(self.survivor_lines()))

    def terminal_points(self) -> List[ProjPoint]:
        return sorted({p for _, p in self.contracted})

    def survivor_docs(self) -> List[SurvivorDoc]:
        return [
            SurvivorDoc(index=idx, degree=eq.degree, equation=FormDoc(degree=eq.degree, terms=eq.to_strings()))
            for eq, idx in self.surviving
        ]

    def contracted_docs(self) -> List[ContractedDoc]:
        return [ContractedDoc(index=idx, point=p.to_strings()) for idx, p in self.contracted]

    def to_doc(self, cmap: CremonaMap) -> ImageDoc:
        return ImageDoc(
            map=cmap.to_doc(),
            surviving=self.survivor_docs(),
            contracted=self.contracted_docs(),
            degree_formula_ok=self.degree_formula_ok,
            image_degree=self.image_degree,
            expected_degree=self.expected_degree,
        )


def _expected_degree(cmap: CremonaMap, f: HomPoly) -> int:
    proper = {bp.point: bp for bp in cmap.proper_base_points()}
    total = cmap.degree * f.degree
    for bp in cmap.base_points:
        if bp.infinitely_near:
            if bp.point in proper and f.multiplicity_at(bp.point) == 0:
                continue
            total -= multiplicity_at_base_point(f, bp) * bp.multiplicity
        else:
            total -= f.multiplicity_at(bp.point) * bp.multiplicity
    return total


def advance(components: Sequence[TrackedComponent], cmap: CremonaMap, history: Sequence[CremonaMap]) -> CurveImage:
    """
    Apply ``cmap`` to tracked components; ``history`` holds the maps already applied.

    Raises:
        CertificateError: parametrized image and strict transform disagree.
    """
    out: List[TrackedComponent] = []
    formula_ok = True
    image_degree = 0
    expected_total = 0
    for comp in components:
        if comp.contracted:
            image = cmap.evaluate(comp.point)  # type: ignore[arg-type]
            if image is not None:
                out.append(replace(comp, point=image, param=(HomPoly.constant(image[0]), HomPoly.constant(image[1]), HomPoly.constant(image[2]))))
                continue
            logger.info(f"component {comp.index} sits at a base point of {cmap.label}; replaying")
            new = TrackedComponent.from_param(comp.index, comp.source, replay_param(list(history) + [cmap], comp.source))
            out.append(new)
            image_degree += new.degree
            continue

        new = TrackedComponent.from_param(comp.index, comp.source, map_param(cmap.forward, comp.param))
        strict = push_forward(cmap, comp.equation)  # type: ignore[arg-type]
        if (strict is None) != new.contracted or (strict is not None and not strict.equivalent(new.equation)):  # type: ignore[arg-type]
            logger.error(f"❌ component {comp.index}: strict transform {strict} vs parametrized image {new.equation}")
            raise CertificateError(f"component {comp.index}: strict transform disagrees with its parametrized image")
        expected = _expected_degree(cmap, comp.equation)  # type: ignore[arg-type]
        if expected != new.degree:
            formula_ok = False
            logger.warning(f"component {comp.index}: degree {new.degree}, formula gives {expected}")
        image_degree += new.degree
        expected_total += expected
        out.append(new)

    surviving = tuple((c.equation, c.index) for c in out if not c.contracted)
    contracted = tuple((c.index, c.point) for c in out if c.contracted)
    return CurveImage(surviving, contracted, formula_ok, image_degree, expected_total, tuple(out))  # type: ignore[arg-type]


def start_components(arr: LineArrangement) -> List[TrackedComponent]:
    return [TrackedComponent.start(i, line) for i, line in enumerate(arr.lines)]


def apply_to_arrangement(cmap: CremonaMap, arr: LineArrangement) -> CurveImage:
    image = advance(start_components(arr), cmap, [])
    logger.debug(
        f"{cmap.label}: {len(image.surviving)} surviving, {len(image.contracted)} contracted, "
        f"degree {image.image_degree} (formula {image.expected_degree})"
    )
    return image


class MapSequence:
    """Maps applied left to right; the composite is never expanded."""

    def __init__(self, maps: Sequence[CremonaMap] = ()):
        self.maps: List[CremonaMap] = list(maps)

    def __len__(self) -> int:
        return len(self.maps)

    def __iter__(self) -> Iterator[CremonaMap]:
        return iter(self.maps)

    def then(self, cmap: CremonaMap) -> "MapSequence":
        return MapSequence(self.maps + [cmap])

    def images(self, arr: LineArrangement) -> List[CurveImage]:
        """The image after each map, in order."""
        components = start_components(arr)
        steps = []
        for k, cmap in enumerate(self.maps):
            image = advance(components, cmap, self.maps[:k])
            components = list(image.components)
            steps.append(image)
        return steps

    def apply(self, arr: LineArrangement) -> CurveImage:
        if not self.maps:
            comps = start_components(arr)
            return CurveImage(
                tuple((c.equation, c.index) for c in comps),  # type: ignore[misc]
                (),
                True,
                arr.d,
                arr.d,
                tuple(comps),
            )
        return self.images(arr)[-1]


def compose(maps: Sequence[CremonaMap]) -> MapSequence:
    return MapSequence(maps)
