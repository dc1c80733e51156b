"""
Classification of unions of lines: vanishing adjoints, bounded Kodaira
dimension and Cremona contractibility.

For d >= 12 the adjoints vanish exactly for the nine types of the theorem
families, and the arrangement is contractible exactly when its type lies in
the (d; d-2) group. Both answers are computed twice: from the type table and
from ranks of the adjoint systems (or an explicit certificate / witness).
For smaller d the rank path is combined with the recipes, the witness
construction and a bounded search, and the answer may be "unknown".
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from src.models.config import Config
from src.models.errors import NoRecipeError, PencilCaseError, WitnessError
from src.models.schemas import ClassificationDoc, WitnessDoc
from src.services.classifier.certificate import ContractionCertificate
from src.services.classifier.recipes import contract, find_recipe
from src.services.classifier.search import SearchBudget, SearchOutcome, search_contraction
from src.services.classifier.structure import StructureReport, structure_check
from src.services.classifier.witnesses import noncontract_witness
from src.services.configuration.arrangement import LineArrangement, config_of
from src.services.configuration.curve_type import CurveType, IncidenceConfig, analyze, numerical_conditions, type_of
from src.services.configuration.families import (
    CONTRACTIBLE_GROUP,
    THEOREM_MIN_DEGREE,
    FamilyTag,
    identify_family,
    theorem_family_of_type,
)
from src.services.linear_systems.adjoints import (
    AdjointSequence,
    adjoint_sequence,
    adjoint_spec,
    adjoint_system,
    kodaira_bounded,
)

logger = logging.getLogger(__name__)

KODAIRA_NEGATIVE = "-inf"

CITE_TYPE_TABLE = "type table for d >= 12: adjoints vanish exactly for the nine theorem types"
CITE_RANKS = "exact ranks of ad_m for every m with d - 3m >= 0"
CITE_RECIPE = "explicit contraction by the {recipe} recipe; a contractible curve has kappa = -inf"
CITE_WITNESS = "member of ad_(2,3) made of lines through the (d-3)-fold point; C times it lies in ad_(3,3)"
CITE_ADJOINT = "C^(m-1) times a member of ad_m lies in ad_(m,m), so P_m > 0 and the curve is not contractible"
CITE_PLURIGENUS = "P_m > 0 by rank, so kappa >= 0 and the curve is not contractible"
CITE_SEARCH = "certificate found by bounded search over quadratic maps"
CITE_UNKNOWN = "no recipe, witness or certificate within the search budget; exhaustion proves nothing"
CITE_D2_GROUP = "for d >= 12 the (d; d-2) group is exactly the contractible part of the theorem families"


# ----------------------------------------------------------------------
# numerical predicates


def jung_is_minimal(t: CurveType) -> bool:
    """d >= m0 + m1 + m2: no quadratic map lowers the degree."""
    return t.d >= t.m(0) + t.m(1) + t.m(2)


def marletta_index(t: CurveType) -> int:
    """Index i = [(d - m0)/2] of a nonempty adjoint for Cremona-minimal curves with m0 > d/3."""
    return (t.d - t.m0) // 2


def noether_applicable(t: CurveType) -> bool:
    return t.m(0) + t.m(1) + t.m(2) > t.d


def quadratic_degree_drop(d: int, m0: int, m1: int, m2: int) -> int:
    """Degree of the image under the quadratic map based at the three points."""
    return 2 * d - (m0 + m1 + m2)


def numerical_conditions_check(t: CurveType) -> Dict[str, bool]:
    """Necessary numerical conditions for vanishing adjoints; empty for pencils."""
    try:
        return numerical_conditions(t)
    except PencilCaseError:
        return {}


def type_diagnostics(t: CurveType) -> Dict[str, object]:
    """Numerical facts about the type reported next to the classification."""
    diagnostics: Dict[str, object] = {
        "jung_minimal": jung_is_minimal(t),
        "noether_applicable": noether_applicable(t),
        "quadratic_image_degree": quadratic_degree_drop(t.d, t.m(0), t.m(1), t.m(2)),
        "numerical_conditions": numerical_conditions_check(t),
    }
    if 3 * t.m0 > t.d:
        diagnostics["marletta_index"] = marletta_index(t)
    return diagnostics


# ----------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class Classification:
    arrangement: LineArrangement
    curve_type: CurveType
    config: IncidenceConfig
    family: Optional[FamilyTag]
    adjoints: AdjointSequence
    vanishing_adjoints: bool
    vanishing_evidence: str
    kodaira: str
    kodaira_witness_m: Optional[int]
    contractible: str
    citations: Dict[str, str]
    certificate: Optional[ContractionCertificate] = None
    witness: Optional[WitnessDoc] = None
    structure: Optional[StructureReport] = None
    search: Optional[SearchOutcome] = None
    diagnostics: Dict[str, object] = field(default_factory=dict)

    def to_doc(self) -> ClassificationDoc:
        return ClassificationDoc(
            d=self.arrangement.d,
            type=self.curve_type.render(),
            configuration=self.config.render(),
            family=self.family.value if self.family else None,
            vanishing_adjoints=self.vanishing_adjoints,
            vanishing_evidence=self.vanishing_evidence,
            kodaira=self.kodaira,
            kodaira_witness_m=self.kodaira_witness_m,
            contractible=self.contractible,  # type: ignore[arg-type]
            citations=dict(self.citations),
            adjoint_dims=list(self.adjoints.dims),
            certificate=self.certificate.to_doc() if self.certificate else None,
            witness=self.witness,
            structure=self.structure.to_dict() if self.structure and self.structure.applicable else None,
            search=self.search.to_dict() if self.search else None,
            diagnostics=dict(self.diagnostics),
        )


def _first_nonempty(seq: AdjointSequence) -> Optional[int]:
    for offset, dim in enumerate(seq.dims):
        if dim >= 0:
            return seq.n + offset
    return None


def _adjoint_witness(arr: LineArrangement, m: int) -> Optional[WitnessDoc]:
    """A member of ad_m times C^(m-1), checked against ad_(m,m)."""
    member = adjoint_system(arr, 1, m, want_witness=True).witness
    if member is None:
        return None
    product = member.times_lines({line: m - 1 for line in arr.lines}) if m > 1 else member
    if not adjoint_spec(arr, m, m).is_satisfied_by(product):
        logger.error(f"❌ C^{m - 1} times a member of ad_{m} fails the conditions of ad_({m},{m})")
        return None
    return product.to_doc(m, m, f"member of ad_{m} times C^{m - 1}")


def _vanishing(arr: LineArrangement, t: CurveType, seq: AdjointSequence) -> Tuple[bool, str, Dict[str, str]]:
    by_rank = seq.all_empty
    if arr.d < THEOREM_MIN_DEGREE:
        return by_rank, "rank", {"vanishing_adjoints": CITE_RANKS}
    by_type = theorem_family_of_type(t) is not None
    if by_type == by_rank:
        return by_rank, "rank and type table agree", {"vanishing_adjoints": f"{CITE_TYPE_TABLE}; {CITE_RANKS}"}
    logger.error(f"❌ {t}: type table says vanishing={by_type}, ranks say {by_rank}; keeping the ranks")
    return by_rank, "rank (type table disagrees)", {"vanishing_adjoints": CITE_RANKS}


def classify(
    arr: LineArrangement,
    seed: Optional[int] = None,
    kodaira_bound: Optional[int] = None,
    budget: Optional[SearchBudget] = None,
) -> Classification:
    """
    Classify ``arr``.

    Args:
        arr: union of lines
        seed: seed of every general choice (recipes, witnesses, search)
        kodaira_bound: largest m of the plurigenus test when nothing else decides
        budget: limits of the contraction search
    """
    if seed is None:
        seed = Config.CREMONA_SEED
    if kodaira_bound is None:
        kodaira_bound = Config.get_search_config()["kodaira_bound"]
    cfg, _ = config_of(arr)
    t = type_of(cfg)
    family = identify_family(cfg)
    logger.info(f"🔍 classifying {cfg} of type {t} (family {family.value if family else 'none'})")

    seq = adjoint_sequence(arr, 1)
    vanishing, evidence, citations = _vanishing(arr, t, seq)
    structure = structure_check(arr) if t.d > t.m0 else None
    diagnostics = type_diagnostics(t)
    failed = [name for name, ok in numerical_conditions_check(t).items() if not ok]
    if vanishing and failed and t.d > t.m0 and analyze(t).h >= 1:
        logger.error(f"❌ {t}: adjoints vanish but numerical conditions fail: {failed}")
    common = dict(
        arrangement=arr,
        curve_type=t,
        config=cfg,
        family=family,
        adjoints=seq,
        vanishing_adjoints=vanishing,
        vanishing_evidence=evidence,
        structure=structure,
        diagnostics=diagnostics,
    )

    if not vanishing:
        m = _first_nonempty(seq)
        citations["contractible"] = CITE_ADJOINT
        return Classification(
            kodaira=f"at_least_zero(m={m})",
            kodaira_witness_m=m,
            contractible="no",
            citations=citations,
            witness=_adjoint_witness(arr, m) if m else None,
            **common,
        )

    try:
        recipe = find_recipe(arr)
    except NoRecipeError:
        recipe = None
    if recipe is not None:
        certificate = contract(arr, seed)
        citations["contractible"] = CITE_RECIPE.format(recipe=recipe)
        if arr.d >= THEOREM_MIN_DEGREE:
            citations["contractible"] += f"; {CITE_D2_GROUP}"
            if family is None or family.group != CONTRACTIBLE_GROUP:
                logger.error(f"❌ {t} was contracted but is outside the (d; d-2) group")
        return Classification(
            kodaira=KODAIRA_NEGATIVE,
            kodaira_witness_m=None,
            contractible="yes",
            citations=citations,
            certificate=certificate,
            **common,
        )

    if t.m0 == arr.d - 3:
        try:
            witness = noncontract_witness(arr, seed, confirm=True)
        except WitnessError as e:
            logger.info(f"no (2,3)-adjoint witness: {e}")
        else:
            citations["contractible"] = CITE_WITNESS
            return Classification(
                kodaira="at_least_zero(m=3)",
                kodaira_witness_m=3,
                contractible="no",
                citations=citations,
                witness=witness.to_doc(),
                **common,
            )

    if arr.d >= THEOREM_MIN_DEGREE:
        logger.error(f"❌ {t} has vanishing adjoints but neither a recipe nor a witness applies")

    outcome = search_contraction(arr, budget, seed)
    if outcome.found:
        citations["contractible"] = CITE_SEARCH
        return Classification(
            kodaira=KODAIRA_NEGATIVE,
            kodaira_witness_m=None,
            contractible="yes",
            citations=citations,
            certificate=outcome.certificate,
            search=outcome,
            **common,
        )

    verdict = kodaira_bounded(arr, kodaira_bound)
    if not verdict.negative:
        report = verdict.reports[-1]
        citations["contractible"] = CITE_PLURIGENUS
        return Classification(
            kodaira=verdict.label,
            kodaira_witness_m=verdict.witness_m,
            contractible="no",
            citations=citations,
            witness=report.to_doc().witness,
            search=outcome,
            **common,
        )
    citations["contractible"] = CITE_UNKNOWN
    return Classification(
        kodaira=verdict.label,
        kodaira_witness_m=None,
        contractible="unknown",
        citations=citations,
        search=outcome,
        **common,
    )
