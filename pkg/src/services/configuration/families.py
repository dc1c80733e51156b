"""
Realization of the classified families of line arrangements.

Each family is realized with exact rational coordinates: the special points
and the "general" lines are drawn from a seeded ``random.Random`` with
numerators and denominators bounded by ``Config.RANDOM_COORD_BOUND``. The
result is checked against the expected configuration; on an unintended
concurrence the draw is repeated with fresh randomness.
"""

import logging
import random
import re
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

from src.models.config import Config
from src.models.errors import ConfigParseError, InconsistentTypeError, RealizationError
from src.services.configuration.arrangement import LineArrangement, config_of
from src.services.configuration.curve_type import CurveType, IncidenceConfig, type_of
from src.services.geometry.projective import (
    ProjLine,
    ProjPoint,
    join,
    meet,
    random_line,
    random_line_through,
    random_point,
    random_point_on_line,
)

logger = logging.getLogger(__name__)


class FamilyTag(str, Enum):
    PENCIL = "pencil"
    NEAR_PENCIL = "near-pencil"
    D2_TRIPLE = "d2-triple"
    D2_NODAL = "d2-nodal"
    D3_QUADRUPLE = "d3-quadruple"
    D3_THREE_TRIPLES = "d3-three-triples"
    D3_TWO_TRIPLES = "d3-two-triples"
    D3_TRIPLE_SHARED = "d3-triple-shared"
    D3_TRIPLE_DISJOINT = "d3-triple-disjoint"
    D3_NODAL = "d3-nodal"
    CONTROL = "control"
    GENERAL = "general"

    @property
    def notation(self) -> str:
        return FAMILY_NOTATION[self]

    @property
    def min_d(self) -> int:
        return FAMILY_MIN_D[self]

    @property
    def group(self) -> str:
        return FAMILY_GROUP[self]

    def expected_config(self, d: int) -> IncidenceConfig:
        if d < self.min_d:
            raise ConfigParseError(f"family {self.value} needs d >= {self.min_d}, got {d}")
        return self.config_at(d)

    def config_at(self, d: int) -> IncidenceConfig:
        """The family's blocks at any d, including the degenerate small ones."""
        blocks = [b for b in _BLOCKS[self](d) if len(b) >= 3]
        return IncidenceConfig(d, tuple(tuple(b) for b in blocks))

    def curve_type(self, d: int) -> CurveType:
        return type_of(self.expected_config(d))

    def type_at(self, d: int) -> Optional[CurveType]:
        """Type of the family's shape at degree d, None where the shape does not exist."""
        try:
            return type_of(self.config_at(d))
        except (ConfigParseError, InconsistentTypeError):
            return None


FAMILY_NOTATION: Dict[FamilyTag, str] = {
    FamilyTag.PENCIL: "(d;d)",
    FamilyTag.NEAR_PENCIL: "(d;d-1,2^{d-1})",
    FamilyTag.D2_TRIPLE: "(d;d-2,3,2^{2(d-3)})",
    FamilyTag.D2_NODAL: "(d;d-2,2^{2d-3})",
    FamilyTag.D3_QUADRUPLE: "(d;d-3,4,2^{3(d-4)})",
    FamilyTag.D3_THREE_TRIPLES: "(d;d-3,3^3,2^{3(d-5)})",
    FamilyTag.D3_TWO_TRIPLES: "(d;d-3,3^2,2^{3(d-4)})",
    FamilyTag.D3_TRIPLE_SHARED: "(d;{1..d-3},{1,d-2,d-1})",
    FamilyTag.D3_TRIPLE_DISJOINT: "(d;{4..d},{1,2,3})",
    FamilyTag.D3_NODAL: "(d;d-3,2^{3(d-2)})",
    FamilyTag.CONTROL: "(d;d-4,2^{4d-10})",
    FamilyTag.GENERAL: "(d;2^{d(d-1)/2})",
}

FAMILY_MIN_D: Dict[FamilyTag, int] = {
    FamilyTag.PENCIL: 1,
    FamilyTag.NEAR_PENCIL: 3,
    FamilyTag.D2_TRIPLE: 5,
    FamilyTag.D2_NODAL: 5,
    FamilyTag.D3_QUADRUPLE: 7,
    FamilyTag.D3_THREE_TRIPLES: 6,
    FamilyTag.D3_TWO_TRIPLES: 6,
    FamilyTag.D3_TRIPLE_SHARED: 6,
    FamilyTag.D3_TRIPLE_DISJOINT: 6,
    FamilyTag.D3_NODAL: 6,
    FamilyTag.CONTROL: 7,
    FamilyTag.GENERAL: 1,
}

FAMILY_GROUP: Dict[FamilyTag, str] = {
    FamilyTag.PENCIL: "d-2",
    FamilyTag.NEAR_PENCIL: "d-2",
    FamilyTag.D2_TRIPLE: "d-2",
    FamilyTag.D2_NODAL: "d-2",
    FamilyTag.D3_QUADRUPLE: "d-3a",
    FamilyTag.D3_THREE_TRIPLES: "d-3a",
    FamilyTag.D3_TWO_TRIPLES: "d-3a",
    FamilyTag.D3_TRIPLE_SHARED: "d-3a",
    FamilyTag.D3_TRIPLE_DISJOINT: "d-3a",
    FamilyTag.D3_NODAL: "d-3b",
    FamilyTag.CONTROL: "control",
    FamilyTag.GENERAL: "general",
}

CONTRACTIBLE_GROUP = "d-2"
THEOREM_FAMILIES = [tag for tag in FamilyTag if FAMILY_GROUP[tag] in ("d-2", "d-3a", "d-3b")]
THEOREM_MIN_DEGREE = 12


def theorem_family_of_type(t: CurveType) -> Optional[FamilyTag]:
    """Theorem family whose type at t.d is t; both triple-point variants share a group."""
    for tag in THEOREM_FAMILIES:
        if t.d >= tag.min_d and tag.type_at(t.d) == t:
            return tag
    return None

_BLOCKS: Dict[FamilyTag, Callable[[int], List[List[int]]]] = {
    FamilyTag.PENCIL: lambda d: [list(range(1, d + 1))],
    FamilyTag.NEAR_PENCIL: lambda d: [list(range(1, d))],
    FamilyTag.D2_TRIPLE: lambda d: [list(range(3, d + 1)), [1, 2, 3]],
    FamilyTag.D2_NODAL: lambda d: [list(range(3, d + 1))],
    FamilyTag.D3_QUADRUPLE: lambda d: [list(range(4, d + 1)), [1, 2, 3, 4]],
    FamilyTag.D3_THREE_TRIPLES: lambda d: [list(range(4, d + 1)), [1, 2, 4], [1, 3, 5], [2, 3, 6]],
    FamilyTag.D3_TWO_TRIPLES: lambda d: [list(range(4, d + 1)), [1, 2, 4], [1, 3, 5]],
    FamilyTag.D3_TRIPLE_SHARED: lambda d: [list(range(1, d - 2)), [1, d - 2, d - 1]],
    FamilyTag.D3_TRIPLE_DISJOINT: lambda d: [list(range(4, d + 1)), [1, 2, 3]],
    FamilyTag.D3_NODAL: lambda d: [list(range(4, d + 1))],
    FamilyTag.CONTROL: lambda d: [list(range(5, d + 1))],
    FamilyTag.GENERAL: lambda d: [],
}


def _through(p: ProjPoint, count: int, rng: random.Random, bound: int) -> List[ProjLine]:
    return [random_line_through(p, rng, bound) for _ in range(count)]


def _general(count: int, rng: random.Random, bound: int) -> List[ProjLine]:
    return [random_line(rng, bound) for _ in range(count)]


def _draw_lines(tag: FamilyTag, d: int, rng: random.Random, bound: int) -> List[ProjLine]:
    p0 = random_point(rng, bound)
    if tag == FamilyTag.PENCIL:
        return _through(p0, d, rng, bound)
    if tag == FamilyTag.NEAR_PENCIL:
        return _through(p0, d - 1, rng, bound) + _general(1, rng, bound)
    if tag == FamilyTag.D2_TRIPLE:
        shared = random_line_through(p0, rng, bound)
        p1 = random_point_on_line(shared, rng, bound)
        return _through(p1, 2, rng, bound) + [shared] + _through(p0, d - 3, rng, bound)
    if tag == FamilyTag.D2_NODAL:
        return _general(2, rng, bound) + _through(p0, d - 2, rng, bound)
    if tag == FamilyTag.D3_QUADRUPLE:
        shared = random_line_through(p0, rng, bound)
        p1 = random_point_on_line(shared, rng, bound)
        return _through(p1, 3, rng, bound) + [shared] + _through(p0, d - 4, rng, bound)
    if tag in (FamilyTag.D3_THREE_TRIPLES, FamilyTag.D3_TWO_TRIPLES):
        triangle = _general(3, rng, bound)
        vertices = [meet(triangle[0], triangle[1]), meet(triangle[0], triangle[2]), meet(triangle[1], triangle[2])]
        used = 3 if tag == FamilyTag.D3_THREE_TRIPLES else 2
        joins = [join(p0, v) for v in vertices[:used]]
        return triangle + joins + _through(p0, d - 3 - used, rng, bound)
    if tag == FamilyTag.D3_TRIPLE_SHARED:
        pencil = _through(p0, d - 3, rng, bound)
        p1 = random_point_on_line(pencil[0], rng, bound)
        return pencil + _through(p1, 2, rng, bound) + _general(1, rng, bound)
    if tag == FamilyTag.D3_TRIPLE_DISJOINT:
        p1 = random_point(rng, bound)
        return _through(p1, 3, rng, bound) + _through(p0, d - 3, rng, bound)
    if tag == FamilyTag.D3_NODAL:
        return _general(3, rng, bound) + _through(p0, d - 3, rng, bound)
    if tag == FamilyTag.CONTROL:
        return _general(4, rng, bound) + _through(p0, d - 4, rng, bound)
    return _general(d, rng, bound)


def realize(
    family: FamilyTag,
    d: int,
    seed: int,
    coord_bound: Optional[int] = None,
    max_retries: Optional[int] = None,
) -> LineArrangement:
    """
    Build an arrangement whose configuration is exactly ``family``'s at degree d.

    Raises:
        RealizationError: every attempt produced an unintended concurrence.
    """
    random_config = Config.get_random_config()
    bound = coord_bound or random_config["coord_bound"]
    retries = max_retries or random_config["max_retries"]
    expected = family.expected_config(d)

    for attempt in range(retries):
        rng = random.Random(seed * 7919 + attempt)
        lines = _draw_lines(family, d, rng, bound)
        if len(set(lines)) != d:
            logger.warning(f"realize {family.value} d={d} seed={seed}: repeated line, retrying")
            continue
        arr = LineArrangement(tuple(lines))
        cfg, _ = config_of(arr)
        if cfg == expected:
            logger.info(f"✅ Realized {family.value} d={d} seed={seed} (attempt {attempt + 1})")
            return arr
        logger.warning(
            f"realize {family.value} d={d} seed={seed}: got {cfg}, expected {expected}; retrying"
        )
    raise RealizationError(f"could not realize {family.value} at d={d} (seed {seed}, {retries} attempts)")


def _draw_config(cfg: IncidenceConfig, rng: random.Random, bound: int) -> Optional[List[ProjLine]]:
    """
    Place the lines in index order. A block's point is fixed once two of its
    lines are placed; each new line passes through the fixed points of its
    blocks. None when three fixed points of one line are not collinear.
    """
    fixed: Dict[Tuple[int, ...], ProjPoint] = {}
    placed: Dict[Tuple[int, ...], ProjLine] = {}
    lines: List[ProjLine] = []
    for index in range(1, cfg.d + 1):
        blocks = cfg.block_of(index)
        points = [fixed[b] for b in blocks if b in fixed]
        if len(points) >= 2:
            line = join(points[0], points[1])
            if any(not line.contains(p) for p in points[2:]):
                return None
        elif points:
            line = random_line_through(points[0], rng, bound)
        else:
            line = random_line(rng, bound)
        for b in blocks:
            if b in fixed:
                continue
            if b in placed:
                fixed[b] = meet(placed[b], line)
            else:
                placed[b] = line
        lines.append(line)
    return lines


def realize_config(cfg: IncidenceConfig, seed: int, coord_bound: Optional[int] = None, max_retries: Optional[int] = None) -> LineArrangement:
    """
    Realize a configuration given in notation, line i being the i-th line.

    Only configurations that can be placed line by line are covered.

    Raises:
        RealizationError: no attempt reproduced ``cfg``.
    """
    random_config = Config.get_random_config()
    bound = coord_bound or random_config["coord_bound"]
    retries = max_retries or random_config["max_retries"]
    for attempt in range(retries):
        lines = _draw_config(cfg, random.Random(seed * 7919 + attempt), bound)
        if lines is None:
            raise RealizationError(f"{cfg} cannot be placed line by line")
        if len(set(lines)) != cfg.d:
            continue
        arr = LineArrangement(tuple(lines))
        if config_of(arr)[0] == cfg:
            logger.info(f"✅ Realized {cfg} seed={seed} (attempt {attempt + 1})")
            return arr
        logger.warning(f"realize {cfg} seed={seed}: unintended concurrence, retrying")
    raise RealizationError(f"could not realize {cfg} (seed {seed}, {retries} attempts)")


def random_arrangement(d: int, seed: int, concurrence: float = 0.35, coord_bound: int = 50) -> LineArrangement:
    """Arrangement with seeded random concurrences (lines through existing crossings)."""
    rng = random.Random(seed)
    lines: List[ProjLine] = []
    while len(lines) < d:
        crossings = sorted({meet(a, b) for i, a in enumerate(lines) for b in lines[i + 1 :]})
        if crossings and rng.random() < concurrence:
            candidate = random_line_through(rng.choice(crossings), rng, coord_bound)
        else:
            candidate = random_line(rng, coord_bound)
        if candidate not in lines:
            lines.append(candidate)
    return LineArrangement(tuple(lines))


def identify_family(cfg: IncidenceConfig) -> Optional[FamilyTag]:
    """The classified family whose configuration ``cfg`` has, if any."""
    t = type_of(cfg)
    for tag in FamilyTag:
        if tag == FamilyTag.GENERAL or cfg.d < tag.min_d:
            continue
        if tag.curve_type(cfg.d) != t:
            continue
        if tag in (FamilyTag.D3_TRIPLE_SHARED, FamilyTag.D3_TRIPLE_DISJOINT):
            shared = len(cfg.blocks) == 2 and bool(set(cfg.blocks[0]) & set(cfg.blocks[1]))
            if shared != (tag == FamilyTag.D3_TRIPLE_SHARED):
                continue
        return tag
    return None


_ALIASES = {
    "(d;d-3,3,2^{3(d-3)})": FamilyTag.D3_TRIPLE_SHARED,
    "(d;{4..d},{2,3,4})": FamilyTag.D3_TRIPLE_SHARED,
    "degree9-special": FamilyTag.D3_TRIPLE_SHARED,
    "(9;{1..6},{1,7,8})": FamilyTag.D3_TRIPLE_SHARED,
}


def parse_family(text: str) -> FamilyTag:
    """Accept a tag name or the family's notation (whitespace-insensitive)."""
    key = re.sub(r"\s+", "", text).lower()
    for tag in FamilyTag:
        if key in (tag.value, tag.name.lower(), re.sub(r"\s+", "", tag.notation).lower()):
            return tag
    if key in _ALIASES:
        return _ALIASES[key]
    raise ConfigParseError(f"unknown family {text!r}")
