"""
Explicit members of the (2,3)-adjoint system of unions of lines with a point
P0 of multiplicity d-3.

There ad_{2,3} has degree 2d-9 and multiplicity 2(d-3)-3 = 2d-9 at P0, so
every member is a product of lines through P0. A singular point q != P0 of
multiplicity m_q forces the line P0q with multiplicity >= 2m_q - 3; the
remaining degree is filled with general lines through P0 (the movable part).
A nonempty ad_{2,3} obstructs contractibility, and C times the member lies in
ad_{3,3}, so P_3 > 0.
"""

import logging
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from src.models.config import Config
from src.models.errors import WitnessError
from src.models.schemas import WitnessDoc
from src.services.configuration.arrangement import LineArrangement, config_of
from src.services.configuration.families import FamilyTag, identify_family
from src.services.geometry.polynomial import HomPoly
from src.services.geometry.projective import ProjLine, ProjPoint, join, random_line_through
from src.services.linear_systems.adjoints import adjoint_spec, log_plurigenus
from src.services.linear_systems.system import FactoredForm

logger = logging.getLogger(__name__)

ROLE_COMPONENT = "component"
ROLE_JOIN = "join"
ROLE_GENERAL = "general"


@dataclass(frozen=True)
class NonContractWitness:
    """A member of ad_{2,3} as lines through P0, and the induced member of ad_{3,3}."""

    center: ProjPoint
    member: FactoredForm
    plurigenus_member: FactoredForm
    family: Optional[FamilyTag]
    description: str
    roles: Dict[ProjLine, str] = field(default_factory=dict, compare=False)
    plurigenus: Optional[int] = None

    n = 2
    m = 3

    def multiplicity_of(self, line: ProjLine) -> int:
        return dict(self.member.line_factors).get(line, 0)

    def general_count(self) -> int:
        return sum(k for line, k in self.member.line_factors if self.roles.get(line) == ROLE_GENERAL)

    def to_doc(self) -> WitnessDoc:
        doc = self.member.to_doc(self.n, self.m, self.description, self.roles)
        return doc.model_copy(update={"plurigenus": self.plurigenus})


def forced_lines(arr: LineArrangement, center: ProjPoint) -> Dict[ProjLine, int]:
    """Least multiplicity of each line through ``center`` in a member of ad_{2,3}."""
    need: Dict[ProjLine, int] = {}
    for q, mult in arr.singular_points():
        if q == center or 2 * mult - 3 <= 0:
            continue
        line = join(center, q)
        need[line] = max(need.get(line, 0), 2 * mult - 3)
    return need


def _describe(arr: LineArrangement, need: Dict[ProjLine, int], free: int) -> str:
    components = [line for line in need if line in arr.lines]
    extras = sorted((k - int(line in arr.lines) for line, k in need.items()), reverse=True)
    extras = [k for k in extras if k > 0]
    parts = [f"the {len(components)} components through P0"]
    if extras:
        parts.append("lines joining P0 to the other singular points with extra multiplicities " + ", ".join(map(str, extras)))
    parts.append(f"{free} general lines through P0")
    return "; ".join(parts)


def noncontract_witness(arr: LineArrangement, seed: Optional[int] = None, confirm: bool = True) -> NonContractWitness:
    """
    Build the member of ad_{2,3} described above and verify it exactly.

    Args:
        arr: union of lines with a point of multiplicity d-3
        seed: seed of the movable lines
        confirm: also compute P_3 by rank

    Raises:
        WitnessError: no point of multiplicity d-3, ad_{2,3} is empty, or a
            vanishing condition fails.
    """
    if seed is None:
        seed = Config.CREMONA_SEED
    sing = arr.singular_points()
    if not sing or sing[0][1] != arr.d - 3:
        raise WitnessError(f"no point of multiplicity d-3 = {arr.d - 3}")
    center = sing[0][0]
    degree = 2 * arr.d - 9
    need = forced_lines(arr, center)
    free = degree - sum(need.values())
    if free < 0:
        raise WitnessError(f"ad_(2,3) is empty: the forced lines through P0 have degree {degree - free} > {degree}")

    rng = random.Random(seed * 7_919 + arr.d)
    general: List[ProjLine] = []
    while len(general) < free:
        line = random_line_through(center, rng, Config.RANDOM_COORD_BOUND)
        if line not in need and line not in general:
            general.append(line)

    factors = dict(need)
    factors.update({line: 1 for line in general})
    member = FactoredForm(tuple(sorted(factors.items())), HomPoly.constant(1))
    if not adjoint_spec(arr, 2, 3).is_satisfied_by(member):
        logger.error(f"❌ ad_(2,3) member {member} fails its conditions")
        raise WitnessError("the ad_(2,3) member fails a vanishing condition")

    p3_member = member.times_lines({line: 1 for line in arr.lines})
    if not adjoint_spec(arr, 3, 3).is_satisfied_by(p3_member):
        raise WitnessError("C times the ad_(2,3) member is not in ad_(3,3)")
    p3: Optional[int] = None
    if confirm:
        p3 = log_plurigenus(arr, 3).value
        if p3 <= 0:
            logger.error(f"❌ d={arr.d}: the ad_(3,3) member exists but the rank gives P_3 = {p3}")
            raise WitnessError(f"rank computation gives P_3 = {p3}")

    roles = {line: ROLE_COMPONENT if line in arr.lines else ROLE_JOIN for line in need}
    roles.update({line: ROLE_GENERAL for line in general})
    family = identify_family(config_of(arr)[0])
    witness = NonContractWitness(center, member, p3_member, family, _describe(arr, need, free), roles, p3)
    logger.info(f"✅ ad_(2,3) witness of degree {degree} for d={arr.d}: {witness.description}")
    return witness
