"""
Line arrangements with exact rational coordinates.
"""

import json
import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

from src.models.errors import CoincidentLinesError, ConfigParseError
from src.models.schemas import ArrangementDoc
from src.services.configuration.curve_type import CurveType, IncidenceConfig, type_of
from src.services.geometry.polynomial import HomPoly
from src.services.geometry.projective import ProjLine, ProjPoint, incident, meet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LineArrangement:
    """An ordered list of d >= 1 pairwise distinct lines."""

    lines: Tuple[ProjLine, ...]

    def __post_init__(self):
        lines = tuple(self.lines)
        if not lines:
            raise ConfigParseError("an arrangement needs at least one line")
        if len(set(lines)) != len(lines):
            raise CoincidentLinesError("arrangement contains coincident lines")
        object.__setattr__(self, "lines", lines)

    @property
    def d(self) -> int:
        return len(self.lines)

    def forms(self) -> List[HomPoly]:
        return [HomPoly.from_line(line) for line in self.lines]

    def lines_through(self, p: ProjPoint) -> List[int]:
        """0-based indices of the lines through p."""
        return [i for i, line in enumerate(self.lines) if incident(p, line)]

    def multiplicity_at(self, p: ProjPoint) -> int:
        return len(self.lines_through(p))

    def intersection_points(self) -> Dict[ProjPoint, Tuple[int, ...]]:
        """Every point where >= 2 lines meet, with the 0-based indices through it."""
        points: Dict[ProjPoint, set] = {}
        for i in range(self.d):
            for j in range(i + 1, self.d):
                p = meet(self.lines[i], self.lines[j])
                points.setdefault(p, set()).update((i, j))
        return {p: tuple(sorted(idx)) for p, idx in sorted(points.items())}

    def singular_points(self) -> List[Tuple[ProjPoint, int]]:
        """(point, multiplicity) sorted by decreasing multiplicity, then coordinates."""
        pts = [(p, len(idx)) for p, idx in self.intersection_points().items()]
        return sorted(pts, key=lambda pm: (-pm[1], pm[0]))

    def geometric_node_count(self) -> int:
        return sum(1 for idx in self.intersection_points().values() if len(idx) == 2)

    # serialization

    def to_doc(self) -> ArrangementDoc:
        return ArrangementDoc(d=self.d, lines=[line.to_strings() for line in self.lines])

    @classmethod
    def from_doc(cls, doc: ArrangementDoc) -> "LineArrangement":
        return cls(tuple(ProjLine.from_strings(row) for row in doc.lines))

    def to_json(self) -> str:
        return json.dumps(self.to_doc().model_dump(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "LineArrangement":
        try:
            return cls.from_doc(ArrangementDoc.model_validate_json(text))
        except ValueError as e:
            raise ConfigParseError(f"invalid arrangement document: {e}") from e


def config_of(arr: LineArrangement) -> Tuple[IncidenceConfig, Dict[Tuple[int, ...], ProjPoint]]:
    """
    The incidence configuration of ``arr`` and the common point of each block.

    Blocks use 1-based line indices.
    """
    blocks: Dict[Tuple[int, ...], ProjPoint] = {}
    for p, idx in arr.intersection_points().items():
        if len(idx) >= 3:
            blocks[tuple(i + 1 for i in idx)] = p
    cfg = IncidenceConfig(arr.d, tuple(blocks))
    return cfg, {block: blocks[block] for block in cfg.blocks}


def type_of_arrangement(arr: LineArrangement) -> CurveType:
    return type_of(config_of(arr)[0])
