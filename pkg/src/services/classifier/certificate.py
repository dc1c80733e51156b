"""
Contraction certificates: the maps of a contraction, the configuration
expected after each of them, and replay verification from scratch.

Responsibilities:
- Accumulate Cremona maps applied to a line arrangement, checking the type
  of the image after every step
- Redraw the general points of a step when they turn out special
- Serialize to ``CertificateDoc`` and verify serialized certificates by
  replaying every map on the source arrangement
"""

import json
import logging
import random
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from src.models.config import Config
from src.models.errors import (
    BirationalityError,
    CertificateError,
    CremonaLinesError,
    DegenerateInputError,
    InadmissibleBaseSchemeError,
)
from src.models.schemas import CertificateDoc, CertificateStepDoc
from src.services.configuration.arrangement import LineArrangement, type_of_arrangement
from src.services.cremona.maps import CremonaMap
from src.services.cremona.pushforward import (
    CurveImage,
    TrackedComponent,
    advance,
    form_line,
    start_components,
)
from src.services.geometry.polynomial import HomPoly
from src.services.geometry.projective import ProjLine, ProjPoint

logger = logging.getLogger(__name__)

TERMINAL = "points"
TIE_BREAK = "lexicographic on canonical coordinates"


def describe_image(image: CurveImage) -> str:
    """Type of the surviving lines, ``points`` when nothing survives."""
    if image.all_contracted:
        return TERMINAL
    if image.survivors_are_lines():
        return type_of_arrangement(image.as_arrangement()).render()
    degrees = sorted(eq.degree for eq, _ in image.surviving)
    return "curves of degrees " + ",".join(str(e) for e in degrees)


@dataclass(frozen=True)
class CertificateStep:
    label: str
    cmap: CremonaMap
    expected_type: Optional[str]
    image: CurveImage

    def to_doc(self) -> CertificateStepDoc:
        return CertificateStepDoc(
            label=self.label,
            map=self.cmap.to_doc(),
            expected_type=self.expected_type,
            surviving=self.image.survivor_docs(),
            contracted=self.image.contracted_docs(),
            degree_formula_ok=self.image.degree_formula_ok,
        )


@dataclass(frozen=True)
class ContractionCertificate:
    """Maps contracting ``source`` to finitely many points."""

    recipe: str
    seed: int
    source: LineArrangement
    steps: Tuple[CertificateStep, ...]

    @property
    def terminal(self) -> List[ProjPoint]:
        return self.steps[-1].image.terminal_points() if self.steps else []

    @property
    def maps(self) -> List[CremonaMap]:
        return [step.cmap for step in self.steps]

    def to_doc(self) -> CertificateDoc:
        return CertificateDoc(
            recipe=self.recipe,
            seed=self.seed,
            source=self.source.to_doc(),
            tie_break=TIE_BREAK,
            steps=[step.to_doc() for step in self.steps],
            terminal=[p.to_strings() for p in self.terminal],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_doc().model_dump(), sort_keys=True, indent=2)

    def verify(self) -> "CertificateCheck":
        return verify_certificate(self.to_doc())


class CertificateBuilder:
    """
    Applies maps one at a time to the tracked components of an arrangement.

    Args:
        arr: the arrangement to contract
        recipe: name recorded in the certificate
        seed: seed of the general points drawn by ``apply_drawn``
    """

    def __init__(self, arr: LineArrangement, recipe: str, seed: int):
        self.source = arr
        self.recipe = recipe
        self.seed = seed
        self.components: List[TrackedComponent] = start_components(arr)
        self.steps: List[CertificateStep] = []
        self.max_retries = Config.get_random_config()["max_retries"]

    @property
    def maps(self) -> List[CremonaMap]:
        return [step.cmap for step in self.steps]

    def survivors(self) -> List[TrackedComponent]:
        return [c for c in self.components if not c.contracted]

    def current_lines(self) -> List[Tuple[int, ProjLine]]:
        """(source index, current line) of every surviving component."""
        out = []
        for comp in self.survivors():
            if comp.degree != 1:
                raise CertificateError(f"component {comp.index} has degree {comp.degree}, expected a line")
            out.append((comp.index, form_line(comp.equation)))  # type: ignore[arg-type]
        return out

    def current_arrangement(self) -> LineArrangement:
        return LineArrangement(tuple(line for _, line in self.current_lines()))

    def apply(self, cmap: CremonaMap, expected: Optional[str]) -> CurveImage:
        """
        Raises:
            CertificateError: the image does not have the expected type, or its
                degree differs from the degree formula.
        """
        image = advance(self.components, cmap, self.maps)
        if not image.degree_formula_ok:
            logger.error(f"❌ {cmap.label}: image degree {image.image_degree}, formula {image.expected_degree}")
            raise CertificateError(f"{cmap.label}: degree formula fails")
        actual = describe_image(image)
        if expected is not None and actual != expected:
            logger.error(f"❌ {cmap.label}: image is {actual}, expected {expected}")
            raise CertificateError(f"{cmap.label}: image is {actual}, expected {expected}")
        self.components = list(image.components)
        self.steps.append(CertificateStep(cmap.label, cmap, expected, image))
        logger.info(f"step {len(self.steps)} ({cmap.label}): {actual}")
        return image

    def apply_drawn(
        self,
        make_map: Callable[[random.Random], CremonaMap],
        expected: Optional[str],
    ) -> CurveImage:
        """Apply a map built from general points, redrawing them until the image is as expected."""
        last_error: Optional[Exception] = None
        for attempt in range(self.max_retries):
            rng = random.Random(self.seed * 104_729 + len(self.steps) * 1_009 + attempt)
            try:
                return self.apply(make_map(rng), expected)
            except (DegenerateInputError, InadmissibleBaseSchemeError, BirationalityError, CertificateError) as e:
                last_error = e
                logger.warning(f"step {len(self.steps) + 1}: general points rejected ({e}), redrawing")
        raise CertificateError(f"step {len(self.steps) + 1}: no admissible general points: {last_error}")

    def finish(self) -> ContractionCertificate:
        if self.survivors():
            raise CertificateError(f"{len(self.survivors())} components survive the {self.recipe} recipe")
        return ContractionCertificate(self.recipe, self.seed, self.source, tuple(self.steps))


# ----------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class CertificateCheck:
    ok: bool
    steps_checked: int
    failed_step: Optional[int] = None
    reason: str = ""
    terminal: Tuple[ProjPoint, ...] = field(default=())
    degree_formula: Tuple[bool, ...] = field(default=())

    def to_dict(self) -> Dict:
        return {
            "ok": self.ok,
            "steps_checked": self.steps_checked,
            "failed_step": self.failed_step,
            "reason": self.reason,
            "terminal": [p.to_strings() for p in self.terminal],
            "degree_formula_ok": list(self.degree_formula),
        }


def _compare_step(step: CertificateStepDoc, image: CurveImage) -> Optional[str]:
    recorded = {s.index: HomPoly.from_strings(s.equation.degree, s.equation.terms) for s in step.surviving}
    actual = {idx: eq for eq, idx in image.surviving}
    if recorded.keys() != actual.keys():
        return f"surviving components {sorted(actual)} differ from recorded {sorted(recorded)}"
    for idx, eq in actual.items():
        if not eq.equivalent(recorded[idx]):
            return f"component {idx} maps to {eq}, recorded {recorded[idx]}"
    recorded_points = {c.index: ProjPoint.from_strings(c.point) for c in step.contracted}
    if recorded_points != dict(image.contracted):
        return "contracted points differ from the recorded ones"
    if not image.degree_formula_ok:
        return f"degree formula fails: image degree {image.image_degree}, formula {image.expected_degree}"
    if step.expected_type is not None and describe_image(image) != step.expected_type:
        return f"image is {describe_image(image)}, expected {step.expected_type}"
    return None


def verify_certificate(doc: CertificateDoc) -> CertificateCheck:
    """Replay every map on the source; report the first step that does not reproduce."""
    try:
        arr = LineArrangement.from_doc(doc.source)
    except CremonaLinesError as e:
        return CertificateCheck(False, 0, 0, f"source arrangement: {e}")
    components = start_components(arr)
    history: List[CremonaMap] = []
    formula: List[bool] = []
    image: Optional[CurveImage] = None
    for k, step in enumerate(doc.steps, start=1):
        try:
            cmap = CremonaMap.from_doc(step.map, label=step.label)
            cmap.verify()
            image = advance(components, cmap, history)
            formula.append(image.degree_formula_ok)
        except CremonaLinesError as e:
            logger.error(f"❌ certificate step {k} ({step.label}): {e}")
            return CertificateCheck(False, k - 1, k, str(e))
        problem = _compare_step(step, image)
        if problem:
            logger.error(f"❌ certificate step {k} ({step.label}): {problem}")
            return CertificateCheck(False, k - 1, k, problem)
        components = list(image.components)
        history.append(cmap)

    if image is None or not image.all_contracted:
        return CertificateCheck(False, len(doc.steps), None, "components survive the last step")
    terminal = image.terminal_points()
    if [p.to_strings() for p in terminal] != doc.terminal:
        return CertificateCheck(False, len(doc.steps), None, "terminal points differ from the recorded ones")
    logger.info(f"✅ certificate ({doc.recipe}) verified in {len(doc.steps)} steps")
    return CertificateCheck(True, len(doc.steps), None, "", tuple(terminal), tuple(formula))
