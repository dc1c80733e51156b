"""
CLI Controller for cremona-lines.

Loads the input arrangement of a run, delegates to the classifier, linear
system and Cremona services, and returns JSON-ready payloads for the views.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from src.models.errors import ConfigParseError, DegenerateInputError, UsageError
from src.models.schemas import CertificateDoc, CremonaMapDoc, RunConfig
from src.services.classifier.certificate import describe_image, verify_certificate
from src.services.classifier.recipes import contract
from src.services.classifier.search import SearchBudget
from src.services.classifier.theorem import classify
from src.services.configuration.arrangement import LineArrangement, type_of_arrangement
from src.services.configuration.curve_type import parse_config
from src.services.configuration.families import parse_family, realize, realize_config
from src.services.cremona.maps import (
    CremonaMap,
    dejonquieres_map,
    quadratic_map,
    quadratic_map_tangent,
    quartic_map,
)
from src.services.cremona.pushforward import apply_to_arrangement
from src.services.geometry.projective import ProjLine, ProjPoint
from src.services.linear_systems.adjoints import adjoint_sequence, adjoint_type, kodaira_bounded

logger = logging.getLogger(__name__)


@dataclass
class CommandResult:
    command: str
    payload: Dict[str, Any]
    ok: bool = True
    files: List[str] = field(default_factory=list)


# ----------------------------------------------------------------------
# map specs


def _triple(text: str) -> List[str]:
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != 3 or not all(parts):
        raise UsageError(f"expected three comma-separated coordinates, got {text!r}")
    return parts


def _point(text: str) -> ProjPoint:
    try:
        return ProjPoint.from_strings(_triple(text))
    except (ConfigParseError, DegenerateInputError) as e:
        raise UsageError(f"bad point {text!r}: {e}") from e


def _line(text: str) -> ProjLine:
    try:
        return ProjLine.from_strings(_triple(text))
    except (ConfigParseError, DegenerateInputError) as e:
        raise UsageError(f"bad line {text!r}: {e}") from e


MAP_KINDS = ("quadratic", "tangent", "dejonquieres", "quartic")


def _build_map(kind: str, items: List[str]) -> CremonaMap:
    if kind == "dejonquieres":
        if len(items) < 3:
            raise UsageError("a dejonquieres map spec needs a center and at least two simple points")
        return dejonquieres_map(_point(items[0]), [_point(s) for s in items[1:]])
    count = 6 if kind == "quartic" else 3
    if len(items) != count:
        raise UsageError(f"a {kind} map spec needs {count} items, got {len(items)}")
    if kind == "quadratic":
        return quadratic_map(*[_point(s) for s in items])
    if kind == "tangent":
        return quadratic_map_tangent(_point(items[0]), _line(items[1]), _point(items[2]))
    return quartic_map([_point(s) for s in items[:3]], [_point(s) for s in items[3:]])


def parse_map_spec(spec: str) -> CremonaMap:
    """
    ``kind:item;item;...`` with points and lines as ``a,b,c``:

    - ``quadratic:P;Q;R``
    - ``tangent:P;L;R`` (L a line through P)
    - ``dejonquieres:C;S1;...;S2n-2``
    - ``quartic:D1;D2;D3;S1;S2;S3``

    or the path of a JSON map document.
    """
    if spec.endswith(".json"):
        path = Path(spec)
        if not path.is_file():
            raise UsageError(f"map file {spec} not found")
        try:
            return CremonaMap.from_doc(CremonaMapDoc.model_validate_json(path.read_text(encoding="utf-8")), label=path.stem)
        except ValidationError as e:
            raise ConfigParseError(f"invalid map document {spec}: {e}") from e
    kind, sep, body = spec.partition(":")
    kind = kind.strip().lower()
    if not sep or kind not in MAP_KINDS:
        raise UsageError(f"unknown map spec {spec!r}; expected one of {', '.join(MAP_KINDS)}")
    return _build_map(kind, [s for s in body.split(";") if s.strip()])


# ----------------------------------------------------------------------


class CliController:
    """
    Runs one CLI command.

    Responsibilities:
    - Load the input arrangement from notation, a JSON file or a family
    - Delegate each command to its service
    - Write certificate and arrangement files
    """

    def __init__(self, run: RunConfig):
        """
        Args:
            run: validated options of the invocation
        """
        self.run = run
        self._arrangement: Optional[LineArrangement] = None

    def load_input(self) -> LineArrangement:
        if self._arrangement is not None:
            return self._arrangement
        run = self.run
        if run.config:
            arr = realize_config(parse_config(run.config), run.seed)
        elif run.lines:
            path = Path(run.lines)
            if not path.is_file():
                raise UsageError(f"lines file {run.lines} not found")
            arr = LineArrangement.from_json(path.read_text(encoding="utf-8"))
        else:
            arr = realize(parse_family(run.realize or ""), run.d or 0, run.seed)
        logger.info(f"input: {arr.d} lines of type {type_of_arrangement(arr)}")
        self._arrangement = arr
        return arr

    def _write(self, text: str) -> List[str]:
        if not self.run.output:
            return []
        Path(self.run.output).write_text(text + "\n", encoding="utf-8")
        logger.info(f"✅ wrote {self.run.output}")
        return [self.run.output]

    # commands

    def cmd_classify(self) -> CommandResult:
        budget = SearchBudget(self.run.budget_depth, self.run.budget_width)
        result = classify(self.load_input(), self.run.seed, self.run.kodaira_bound, budget)
        return CommandResult("classify", result.to_doc().model_dump())

    def cmd_adjoints(self) -> CommandResult:
        arr = self.load_input()
        t = type_of_arrangement(arr)
        n = self.run.n
        seq = adjoint_sequence(arr, n)
        payload = seq.to_doc().model_dump()
        payload["type"] = t.render()
        payload["systems"] = [
            {"m": n + k, "system": adjoint_type(t, n, n + k).render(), "dim": dim} for k, dim in enumerate(seq.dims)
        ]
        return CommandResult("adjoints", payload)

    def cmd_plurigenera(self) -> CommandResult:
        verdict = kodaira_bounded(self.load_input(), self.run.kodaira_bound, stop_at_first=False)
        return CommandResult("plurigenera", verdict.to_doc().model_dump())

    def cmd_transform(self) -> CommandResult:
        arr = self.load_input()
        cmap = parse_map_spec(self.run.map_spec or "")
        image = apply_to_arrangement(cmap, arr)
        payload = {
            "label": cmap.label,
            "source_type": type_of_arrangement(arr).render(),
            "image": image.to_doc(cmap).model_dump(),
            "image_type": describe_image(image),
        }
        return CommandResult("transform", payload)

    def cmd_contract(self) -> CommandResult:
        certificate = contract(self.load_input(), self.run.seed)
        files = self._write(certificate.to_json())
        return CommandResult("contract", certificate.to_doc().model_dump(), files=files)

    def cmd_verify(self) -> CommandResult:
        path = Path(self.run.certificate or "")
        if not path.is_file():
            raise UsageError(f"certificate file {path} not found")
        try:
            doc = CertificateDoc.model_validate_json(path.read_text(encoding="utf-8"))
        except ValidationError as e:
            raise ConfigParseError(f"invalid certificate document {path}: {e}") from e
        check = verify_certificate(doc)
        return CommandResult("verify", check.to_dict(), ok=check.ok)

    def cmd_realize(self) -> CommandResult:
        arr = self.load_input()
        files = self._write(arr.to_json())
        return CommandResult("realize", arr.to_doc().model_dump(), files=files)

    def dispatch(self) -> CommandResult:
        handler = getattr(self, f"cmd_{self.run.command}")
        logger.info(f"🔍 running {self.run.command}")
        return handler()
