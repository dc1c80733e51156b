"""
Bounded breadth-first search for contractions of small line arrangements.

Moves are quadratic maps (three proper base points, or a point, a tangent
direction along one of the lines and a third point). Base points are drawn
from the crossings of the current lines, two seeded general points on each
line and one free point. A move is kept only when every current line
passes through a base point, so the image is again a union of lines; the
predicted image degree of a move is the sum over the lines of 2 minus the
number of base points on the line.

An exhausted search says nothing about contractibility.
"""

import logging
import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from src.models.config import Config
from src.models.errors import CremonaLinesError
from src.services.classifier.certificate import CertificateStep, ContractionCertificate, describe_image
from src.services.configuration.arrangement import LineArrangement
from src.services.cremona.maps import CremonaMap, quadratic_map, quadratic_map_tangent
from src.services.cremona.pushforward import TrackedComponent, advance, form_line, start_components
from src.services.geometry.projective import (
    ProjLine,
    ProjPoint,
    collinear,
    incident,
    meet,
    random_point,
    random_point_on_line,
)

logger = logging.getLogger(__name__)

SEARCH_RECIPE = "search"
GENERAL_POINT_BOUND = 30
INTENDED_MAX_DEGREE = 7


@dataclass(frozen=True)
class SearchBudget:
    depth: int
    width: int

    @classmethod
    def from_config(cls) -> "SearchBudget":
        cfg = Config.get_search_config()
        return cls(cfg["max_depth"], cfg["max_width"])


@dataclass(frozen=True)
class SearchOutcome:
    found: bool
    certificate: Optional[ContractionCertificate]
    expanded: int
    generated: int
    depth_reached: int
    budget: SearchBudget

    @property
    def status(self) -> str:
        return "certificate" if self.found else "exhausted"

    def to_dict(self) -> Dict:
        return {
            "status": self.status,
            "expanded": self.expanded,
            "generated": self.generated,
            "depth_reached": self.depth_reached,
            "budget_depth": self.budget.depth,
            "budget_width": self.budget.width,
            "steps": len(self.certificate.steps) if self.certificate else None,
        }


@dataclass(frozen=True)
class _State:
    components: Tuple[TrackedComponent, ...]
    steps: Tuple[CertificateStep, ...] = field(default=())

    def lines(self) -> List[ProjLine]:
        return [form_line(c.equation) for c in self.components if not c.contracted]  # type: ignore[arg-type]

    @property
    def key(self) -> Tuple[ProjLine, ...]:
        return tuple(sorted(self.lines()))


@dataclass(frozen=True)
class _Move:
    predicted: int
    kind: int  # 0 proper, 1 tangent
    indices: Tuple[int, ...]


def _candidates(lines: Sequence[ProjLine], rng: random.Random) -> List[ProjPoint]:
    points = sorted({meet(a, b) for a, b in combinations(lines, 2)})
    seen = set(points)
    extra = []
    for line in lines:
        for _ in range(2):
            extra.append(random_point_on_line(line, rng, GENERAL_POINT_BOUND))
    extra.append(random_point(rng, GENERAL_POINT_BOUND))
    for p in extra:
        if p not in seen:
            seen.add(p)
            points.append(p)
    return points


def _moves(lines: Sequence[ProjLine], points: Sequence[ProjPoint]) -> List[_Move]:
    on = [frozenset(i for i, line in enumerate(lines) if incident(p, line)) for p in points]
    d = len(lines)
    moves: List[_Move] = []
    for triple in combinations(range(len(points)), 3):
        hits = [0] * d
        for k in triple:
            for i in on[k]:
                hits[i] += 1
        if min(hits) >= 1 and max(hits) <= 2:
            moves.append(_Move(sum(2 - h for h in hits), 0, triple))
    for k, p_on in enumerate(on):
        for direction in sorted(p_on):
            for r in range(len(points)):
                if r == k or direction in on[r]:
                    continue
                hits = [int(i in p_on) + int(i == direction) + int(i in on[r]) for i in range(d)]
                if min(hits) >= 1 and max(hits) <= 2:
                    moves.append(_Move(sum(2 - h for h in hits), 1, (k, direction, r)))
    moves.sort(key=lambda mv: (mv.predicted, mv.kind, mv.indices))
    return moves


def _build(move: _Move, lines: Sequence[ProjLine], points: Sequence[ProjPoint]) -> Optional[CremonaMap]:
    if move.kind == 0:
        p, q, r = (points[k] for k in move.indices)
        if collinear(p, q, r):
            return None
        return quadratic_map(p, q, r)
    k, direction, r = move.indices
    return quadratic_map_tangent(points[k], lines[direction], points[r])


def _children(state: _State, width: int, rng: random.Random) -> Tuple[List[_State], int]:
    lines = state.lines()
    points = _candidates(lines, rng)
    history = [step.cmap for step in state.steps]
    children: List[_State] = []
    generated = 0
    for move in _moves(lines, points):
        if len(children) >= width:
            break
        try:
            cmap = _build(move, lines, points)
            if cmap is None:
                continue
            image = advance(state.components, cmap, history)
        except CremonaLinesError as e:
            logger.debug(f"search move {move} rejected: {e}")
            continue
        generated += 1
        if not image.survivors_are_lines() or not image.degree_formula_ok:
            continue
        step = CertificateStep(cmap.label, cmap, describe_image(image), image)
        children.append(_State(image.components, state.steps + (step,)))
    return children, generated


def search_contraction(arr: LineArrangement, budget: Optional[SearchBudget] = None, seed: Optional[int] = None) -> SearchOutcome:
    """
    Breadth-first search over quadratic maps, ``budget.width`` moves per state
    and ``budget.width`` states per level, at most ``budget.depth`` maps.
    Deterministic given ``seed``.
    """
    budget = budget or SearchBudget.from_config()
    if seed is None:
        seed = Config.CREMONA_SEED
    if arr.d > INTENDED_MAX_DEGREE:
        logger.warning(f"searching contractions of {arr.d} lines; the move set is meant for d <= {INTENDED_MAX_DEGREE}")

    frontier = [_State(tuple(start_components(arr)))]
    seen = {frontier[0].key}
    expanded = generated = 0
    for depth in range(1, budget.depth + 1):
        level: List[_State] = []
        for index, state in enumerate(frontier):
            rng = random.Random(seed * 1_000_003 + depth * 1009 + index)
            children, made = _children(state, budget.width, rng)
            expanded += 1
            generated += made
            for child in children:
                if not child.lines():
                    certificate = ContractionCertificate(SEARCH_RECIPE, seed, arr, child.steps)
                    logger.info(f"✅ search contracted d={arr.d} in {depth} steps ({expanded} states expanded)")
                    return SearchOutcome(True, certificate, expanded, generated, depth, budget)
                if child.key not in seen:
                    seen.add(child.key)
                    level.append(child)
        if not level:
            logger.info(f"search for d={arr.d}: no admissible moves left at depth {depth}")
            return SearchOutcome(False, None, expanded, generated, depth, budget)
        level.sort(key=lambda s: len(s.lines()))
        frontier = level[: budget.width]
        logger.info(f"search depth {depth}: {len(level)} new states, best has {len(frontier[0].lines())} lines")

    logger.info(f"search for d={arr.d} exhausted its budget ({expanded} states expanded)")
    return SearchOutcome(False, None, expanded, generated, budget.depth, budget)
