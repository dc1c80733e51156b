"""
Constructive contractions of the contractible families.

Responsibilities:
- Pencils: one de Jonquieres map with a simple base point on every line
- Near-pencils: one de Jonquieres map (a quadratic map for three lines)
- (d; d-2, 3, 2^{2(d-3)}) and (d; d-2, 2^{2d-3}): quadratic maps at the
  (d-2)-fold point and two crossings, lowering d by two and keeping the
  family, down to a pencil, a near-pencil or a triangle
- The degree 9 configuration (9; {1..6}, {1,7,8}): four maps to a pair of
  lines, then the conic finisher
- Finishers for a single line and for a conic

Points with equal multiplicity are ordered lexicographically on their
canonical coordinates; lines are taken in arrangement order.
"""

import logging
import random
from math import comb
from typing import Callable, Dict, List, Optional, Tuple

from src.models.config import Config
from src.models.errors import CertificateError, NoRecipeError
from src.services.classifier.certificate import (
    TERMINAL,
    CertificateBuilder,
    ContractionCertificate,
)
from src.services.configuration.arrangement import LineArrangement, config_of, type_of_arrangement
from src.services.configuration.curve_type import CurveType
from src.services.configuration.families import FamilyTag, identify_family
from src.services.cremona.maps import (
    CremonaMap,
    dejonquieres_map,
    quadratic_map,
    quadratic_map_tangent,
    quartic_map,
)
from src.services.geometry.projective import (
    ProjLine,
    ProjPoint,
    incident,
    join,
    meet,
    random_point,
    random_point_on_line,
)

logger = logging.getLogger(__name__)

GENERAL_POINT_BOUND = 30

DESCENT_FAMILIES = (FamilyTag.PENCIL, FamilyTag.NEAR_PENCIL, FamilyTag.D2_TRIPLE, FamilyTag.D2_NODAL)
DEGREE9_RECIPE = "degree9-special"
LINE_RECIPE = "line"


def _on(line: ProjLine, rng: random.Random) -> ProjPoint:
    return random_point_on_line(line, rng, GENERAL_POINT_BOUND)


def _free(rng: random.Random) -> ProjPoint:
    return random_point(rng, GENERAL_POINT_BOUND)


def _general_type(d: int) -> str:
    """Type of d lines in general position."""
    return CurveType(d, (2,) * comb(d, 2)).render()


def _lines(builder: CertificateBuilder) -> List[ProjLine]:
    return [line for _, line in builder.current_lines()]


# ----------------------------------------------------------------------
# single maps


def pencil_map(lines: List[ProjLine], rng: random.Random) -> CremonaMap:
    """de Jonquieres map of degree l+1+e (d = 2l+e) with one simple point per line."""
    center = meet(lines[0], lines[1])
    ell, eps = divmod(len(lines), 2)
    simples = [_on(line, rng) for line in lines]
    if eps:
        simples.append(_free(rng))
    return dejonquieres_map(center, simples, label=f"de Jonquieres degree {ell + 1 + eps} at the {len(lines)}-fold point")


def near_pencil_map(lines: List[ProjLine], rng: random.Random) -> CremonaMap:
    """
    l lines through P0 and one more line L.

    l = 1: quadratic map at L1 n L and one general point on each line.
    l >= 2: de Jonquieres map of degree mu = (l+2)/2 (l even) or (l+3)/2 (l odd)
    centered at P0, simple at L n L1 .. L n L_mu, at a general point of each
    remaining L_i and at 2mu-2-l free general points.
    """
    p0 = LineArrangement(tuple(lines)).singular_points()[0][0]
    pencil = [line for line in lines if incident(p0, line)]
    others = [line for line in lines if not incident(p0, line)]
    if len(others) != 1:
        raise CertificateError(f"not a near-pencil: {len(others)} lines miss the center")
    L = others[0]
    ell = len(pencil)
    if ell == 1:
        return quadratic_map(meet(L, pencil[0]), _on(L, rng), _on(pencil[0], rng), label="quadratic at two crossing lines")
    mu = (ell + 2) // 2 if ell % 2 == 0 else (ell + 3) // 2
    simples = [meet(L, line) for line in pencil[:mu]]
    simples += [_on(line, rng) for line in pencil[mu:]]
    simples += [_free(rng) for _ in range(2 * mu - 2 - ell)]
    return dejonquieres_map(p0, simples, label=f"de Jonquieres degree {mu} at the {ell}-fold point")


def descent_map(lines: List[ProjLine], triple: bool) -> CremonaMap:
    """
    Quadratic map at P0, L1 n La and L2 n Lb.

    P0 is the point of highest multiplicity; La, Lb are the first two lines
    through P0 (avoiding P1 when ``triple``); L1, L2 the first two lines
    through P1 other than P0P1 (``triple``) or missing P0.
    """
    sing = LineArrangement(tuple(lines)).singular_points()
    p0 = sing[0][0]
    if triple:
        p1 = next(p for p, mult in sing[1:] if mult == 3)
        through_p0 = [line for line in lines if incident(p0, line) and not incident(p1, line)]
        outer = [line for line in lines if incident(p1, line) and not incident(p0, line)]
    else:
        through_p0 = [line for line in lines if incident(p0, line)]
        outer = [line for line in lines if not incident(p0, line)]
    if len(through_p0) < 2 or len(outer) < 2:
        raise CertificateError("descent step needs two lines through P0 and two outer lines")
    (la, lb), (l1, l2) = through_p0[:2], outer[:2]
    return quadratic_map(p0, meet(l1, la), meet(l2, lb), label=f"quadratic at the {sing[0][1]}-fold point and two crossings")


def line_finisher(line: ProjLine, rng: random.Random) -> CremonaMap:
    return quadratic_map(_on(line, rng), _on(line, rng), _free(rng), label="quadratic at two points of the last line")


def conic_finisher_points(builder: CertificateBuilder, rng: random.Random) -> Tuple[List[ProjPoint], List[ProjPoint]]:
    """Double points Q1..Q3 and simple points Q4..Q6 for the last conic."""
    survivors = builder.survivors()
    if len(survivors) == 2:
        r1, r2 = (line for _, line in builder.current_lines())
        q = [_on(r1, rng), _on(r1, rng), _on(r2, rng), _on(r2, rng), _on(r2, rng)]
    elif len(survivors) == 1 and survivors[0].degree == 2:
        param = survivors[0].param
        q = []
        while len(q) < 5:
            s, t = rng.randint(-GENERAL_POINT_BOUND, GENERAL_POINT_BOUND), rng.randint(1, GENERAL_POINT_BOUND)
            coords = tuple(c.evaluate((s, t, 0)) for c in param)
            if any(c != 0 for c in coords):
                q.append(ProjPoint(coords))
    else:
        raise CertificateError("the conic finisher needs a conic or two lines")
    return q[:3], q[3:] + [_free(rng)]


def finish(builder: CertificateBuilder) -> None:
    """Contract the last line or conic."""
    survivors = builder.survivors()
    if not survivors:
        return
    degree = sum(c.degree for c in survivors)
    if degree == 1:
        line = builder.current_lines()[0][1]
        builder.apply_drawn(lambda rng: line_finisher(line, rng), TERMINAL)
    elif degree == 2:

        def make(rng: random.Random) -> CremonaMap:
            doubles, simples = conic_finisher_points(builder, rng)
            return quartic_map(doubles, simples, label="quartic net with three double points on the last conic")

        builder.apply_drawn(make, TERMINAL)
    else:
        raise CertificateError(f"no finisher for survivors of total degree {degree}")


# ----------------------------------------------------------------------
# recipes


def _pencil(builder: CertificateBuilder) -> None:
    lines = _lines(builder)
    if len(lines) == 1:
        finish(builder)
        return
    builder.apply_drawn(lambda rng: pencil_map(lines, rng), TERMINAL)


def _near_pencil(builder: CertificateBuilder) -> None:
    lines = _lines(builder)
    builder.apply_drawn(lambda rng: near_pencil_map(lines, rng), TERMINAL)


def _descent(builder: CertificateBuilder, tag: FamilyTag) -> None:
    triple = tag == FamilyTag.D2_TRIPLE
    floor = 4 if triple else 3
    while len(builder.survivors()) > floor:
        lines = _lines(builder)
        expected = tag.type_at(len(lines) - 2)
        builder.apply(descent_map(lines, triple), expected.render() if expected else None)

    d = len(builder.survivors())
    if triple and d == 4:
        _near_pencil(builder)
    elif not triple and d == 3:
        vertices = sorted(LineArrangement(tuple(_lines(builder))).intersection_points())
        builder.apply(quadratic_map(*vertices, label="quadratic at the triangle vertices"), TERMINAL)
    else:
        _pencil(builder)


def _degree9(builder: CertificateBuilder) -> None:
    """
    (9; {1..6}, {1,7,8}): P0 sextuple, P1 triple, L1 = P0P1, L2..L6 through
    P0, L7, L8 through P1, L9 through neither; P_ij = L_i n L_j in the
    current images.
    """
    arr = builder.current_arrangement()
    sing = arr.singular_points()
    p0, p1 = sing[0][0], sing[1][0]
    current = dict(builder.current_lines())
    shared = [i for i, line in current.items() if incident(p0, line) and incident(p1, line)]
    pencil = [i for i, line in current.items() if incident(p0, line) and not incident(p1, line)]
    outer = [i for i, line in current.items() if incident(p1, line) and not incident(p0, line)]
    rest = [i for i, line in current.items() if not incident(p0, line) and not incident(p1, line)]
    if (len(shared), len(pencil), len(outer), len(rest)) != (1, 5, 2, 1):
        raise NoRecipeError("not the configuration (9; {1..6}, {1,7,8})")
    name = dict(zip(range(1, 10), shared + pencil + outer + rest))

    def line(i: int) -> ProjLine:
        return dict(builder.current_lines())[name[i]]

    def P(i: int, j: int) -> ProjPoint:
        return meet(line(i), line(j))

    builder.apply(
        dejonquieres_map(p0, [p1, P(4, 7), P(5, 8), P(6, 9), P(7, 9), P(8, 9)], label="de Jonquieres degree 4 at the sextuple point"),
        _general_type(5),
    )
    builder.apply(quadratic_map(P(2, 8), P(3, 7), P(3, 9), label="quadratic at P28, P37, P39"), _general_type(4))
    p27, p29, l8 = P(2, 7), P(2, 9), line(8)
    builder.apply_drawn(
        lambda rng: quadratic_map(p27, p29, _on(l8, rng), label="quadratic at P27, P29 and a point of L8"),
        _general_type(3),
    )
    p78, l7, l9 = P(7, 8), line(7), line(9)
    builder.apply_drawn(
        lambda rng: quadratic_map_tangent(p78, l7, _on(l9, rng), label="quadratic at P78 tangent to L7 and a point of L9"),
        _general_type(2),
    )
    finish(builder)


_RECIPES: Dict[str, Callable[[CertificateBuilder], None]] = {
    FamilyTag.PENCIL.value: _pencil,
    FamilyTag.NEAR_PENCIL.value: _near_pencil,
    FamilyTag.D2_TRIPLE.value: lambda b: _descent(b, FamilyTag.D2_TRIPLE),
    FamilyTag.D2_NODAL.value: lambda b: _descent(b, FamilyTag.D2_NODAL),
    DEGREE9_RECIPE: _degree9,
    LINE_RECIPE: finish,
}


def find_recipe(arr: LineArrangement) -> str:
    """
    Raises:
        NoRecipeError: no constructive contraction is known for ``arr``.
    """
    if arr.d == 1:
        return LINE_RECIPE
    t = type_of_arrangement(arr)
    for tag in DESCENT_FAMILIES:
        if tag.type_at(arr.d) == t:
            return tag.value
    cfg, _ = config_of(arr)
    if arr.d == 9 and identify_family(cfg) == FamilyTag.D3_TRIPLE_SHARED:
        return DEGREE9_RECIPE
    raise NoRecipeError(f"no contraction recipe for {cfg} of type {t}")


def has_recipe(arr: LineArrangement) -> bool:
    try:
        find_recipe(arr)
    except NoRecipeError:
        return False
    return True


def contract(arr: LineArrangement, seed: Optional[int] = None) -> ContractionCertificate:
    """
    Contract ``arr`` to points with the recipe of its family.

    Raises:
        NoRecipeError: no recipe applies.
        CertificateError: an intermediate image has an unexpected type.
    """
    if seed is None:
        seed = Config.CREMONA_SEED
    recipe = find_recipe(arr)
    logger.info(f"🔍 contracting d={arr.d} with the {recipe} recipe (seed {seed})")
    builder = CertificateBuilder(arr, recipe, seed)
    _RECIPES[recipe](builder)
    certificate = builder.finish()
    logger.info(f"✅ {recipe}: contracted to {len(certificate.terminal)} points in {len(certificate.steps)} steps")
    return certificate
