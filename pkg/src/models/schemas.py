"""
JSON documents exchanged by the CLI.

Rationals are always strings ``"p/q"`` or ``"p"``; every document re-parses
to an equal value.
"""

from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

RationalStr = str
FormTerm = List[Union[int, str]]


def _check_rational(value: str) -> str:
    text = value.strip()
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            q = Fraction(int(num), int(den))
        else:
            q = Fraction(int(text))
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"not a rational string: {value!r}") from e
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _check_triple(values: List[str]) -> List[str]:
    if len(values) != 3:
        raise ValueError("expected three homogeneous coordinates")
    out = [_check_rational(v) for v in values]
    if all(Fraction(v) == 0 for v in out):
        raise ValueError("all coordinates are zero")
    return out


class _Doc(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ArrangementDoc(_Doc):
    d: int = Field(ge=1)
    lines: List[List[RationalStr]]

    @field_validator("lines")
    @classmethod
    def _lines_are_triples(cls, v: List[List[str]]) -> List[List[str]]:
        return [_check_triple(row) for row in v]

    @model_validator(mode="after")
    def _count_matches(self) -> "ArrangementDoc":
        if len(self.lines) != self.d:
            raise ValueError(f"d = {self.d} but {len(self.lines)} lines given")
        return self


class FormDoc(_Doc):
    degree: int = Field(ge=0)
    terms: List[FormTerm]

    @field_validator("terms")
    @classmethod
    def _terms_shape(cls, v: List[FormTerm]) -> List[FormTerm]:
        for term in v:
            if len(term) != 4:
                raise ValueError("a term is [i, j, k, coefficient]")
        return v


class BasePointDoc(_Doc):
    point: List[RationalStr]
    multiplicity: int = Field(ge=1)
    direction: Optional[List[RationalStr]] = None


class CremonaMapDoc(_Doc):
    kind: Literal["quadratic", "tangent_quadratic", "dejonquieres", "net"]
    degree: int = Field(ge=1)
    base_points: List[BasePointDoc]
    forward: List[FormDoc]
    inverse: List[FormDoc]
    exceptional: List[FormDoc] = Field(default_factory=list)

    @field_validator("forward", "inverse")
    @classmethod
    def _three_forms(cls, v: List[FormDoc]) -> List[FormDoc]:
        if len(v) != 3:
            raise ValueError("a plane map has three coordinate forms")
        return v


class SurvivorDoc(_Doc):
    index: int
    degree: int
    equation: FormDoc


class ContractedDoc(_Doc):
    index: int
    point: List[RationalStr]


class CertificateStepDoc(_Doc):
    label: str
    map: CremonaMapDoc
    expected_type: Optional[str] = None
    surviving: List[SurvivorDoc]
    contracted: List[ContractedDoc]
    degree_formula_ok: bool = True


class CertificateDoc(_Doc):
    recipe: str
    seed: int
    source: ArrangementDoc
    tie_break: str = "lexicographic on canonical coordinates"
    steps: List[CertificateStepDoc]
    terminal: List[List[RationalStr]]


class LineFactorDoc(_Doc):
    line: List[RationalStr]
    multiplicity: int = Field(ge=1)
    role: str = "fixed"


class WitnessDoc(_Doc):
    n: int
    m: int
    degree: int
    line_factors: List[LineFactorDoc]
    residual: FormDoc
    description: str
    plurigenus: Optional[int] = None


class AdjointReportDoc(_Doc):
    n: int
    dims: List[int]
    first_empty_m: Optional[int]
    stabilized: bool


class PlurigenusDoc(_Doc):
    m: int
    value: int
    witness: Optional[WitnessDoc] = None


class PlurigeneraDoc(_Doc):
    bound: int
    values: List[PlurigenusDoc]
    verdict: str
    witness_m: Optional[int] = None
    agrees_with_theorem: Optional[bool] = None


class ImageDoc(_Doc):
    map: CremonaMapDoc
    surviving: List[SurvivorDoc]
    contracted: List[ContractedDoc]
    degree_formula_ok: bool
    image_degree: int
    expected_degree: int


class ClassificationDoc(_Doc):
    d: int
    type: str
    configuration: str
    family: Optional[str]
    vanishing_adjoints: bool
    vanishing_evidence: str
    kodaira: str
    kodaira_witness_m: Optional[int] = None
    contractible: Literal["yes", "no", "unknown"]
    citations: Dict[str, str]
    adjoint_dims: List[int] = Field(default_factory=list)
    certificate: Optional[CertificateDoc] = None
    witness: Optional[WitnessDoc] = None
    structure: Optional[Dict[str, Any]] = None
    search: Optional[Dict[str, Any]] = None
    diagnostics: Dict[str, Any] = Field(default_factory=dict)


class RunConfig(_Doc):
    """Validated options of one CLI invocation."""

    command: Literal["classify", "adjoints", "plurigenera", "transform", "contract", "verify", "realize"]
    config: Optional[str] = None
    lines: Optional[str] = None
    realize: Optional[str] = None
    d: Optional[int] = Field(default=None, ge=1)
    seed: int = Field(default=1, ge=0)
    kodaira_bound: int = Field(default=12, ge=1)
    budget_depth: int = Field(default=6, ge=1)
    budget_width: int = Field(default=12, ge=1)
    output_format: Literal["text", "json"] = "text"
    n: int = Field(default=1, ge=1)
    map_spec: Optional[str] = None
    certificate: Optional[str] = None
    output: Optional[str] = None

    @model_validator(mode="after")
    def _one_input(self) -> "RunConfig":
        if self.command == "verify":
            if not self.certificate:
                raise ValueError("verify needs a certificate file")
            return self
        sources = [s for s in (self.config, self.lines, self.realize) if s]
        if len(sources) != 1:
            raise ValueError("exactly one of --config, --lines, --realize is required")
        if self.realize and self.d is None:
            raise ValueError("--realize needs --d")
        if self.command == "transform" and not self.map_spec:
            raise ValueError("transform needs --map")
        return self
