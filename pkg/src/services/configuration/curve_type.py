"""
Incidence configurations and multiplicity types of unions of lines.

Notation follows the usual one for line arrangements:
``(d; {a,b,c}, {a,e,f})`` lists the points of multiplicity >= 3 together
with the (1-based) indices of the lines through them, and
``(d; m0, m1, ..., 2^k)`` is the multiplicity type.
"""

import logging
import re
from dataclasses import dataclass, field
from math import comb
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from src.models.errors import ConfigParseError, InconsistentTypeError, PencilCaseError

logger = logging.getLogger(__name__)

_CONFIG_RE = re.compile(r"^\(\s*(\d+)\s*[;,]\s*(.*)\)$", re.S)
_BLOCK_RE = re.compile(r"\{([^{}]*)\}")


@dataclass(frozen=True)
class IncidenceConfig:
    """d lines and the blocks of >= 3 concurrent lines, normalized."""

    d: int
    blocks: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if self.d < 1:
            raise ConfigParseError("a configuration needs at least one line")
        normalized = []
        for block in self.blocks:
            indices = tuple(sorted(set(int(i) for i in block)))
            if len(indices) != len(block):
                raise ConfigParseError(f"repeated index in block {set(block)}")
            if len(indices) < 3:
                raise ConfigParseError(f"block {set(indices)} has size < 3")
            if indices[0] < 1 or indices[-1] > self.d:
                raise ConfigParseError(f"index out of range in block {set(indices)}")
            normalized.append(indices)
        normalized.sort(key=lambda b: (-len(b), b))
        for a in range(len(normalized)):
            for b in range(a + 1, len(normalized)):
                shared = set(normalized[a]) & set(normalized[b])
                if len(shared) >= 2:
                    raise ConfigParseError(
                        f"blocks {set(normalized[a])} and {set(normalized[b])} share {len(shared)} lines"
                    )
        object.__setattr__(self, "blocks", tuple(normalized))

    def block_of(self, index: int) -> List[Tuple[int, ...]]:
        return [b for b in self.blocks if index in b]

    def render(self) -> str:
        return render_config(self)

    def __str__(self) -> str:
        return self.render()


def parse_config(text: str) -> IncidenceConfig:
    """Parse ``(d; {i,j,k}, ...)``; whitespace-insensitive."""
    match = _CONFIG_RE.match(text.strip())
    if not match:
        raise ConfigParseError(f"malformed configuration: {text!r}")
    d = int(match.group(1))
    rest = match.group(2).strip()
    blocks = []
    for block_text in _BLOCK_RE.findall(rest):
        items = [s for s in re.split(r"[\s,]+", block_text.strip()) if s]
        try:
            blocks.append(tuple(int(s) for s in items))
        except ValueError as e:
            raise ConfigParseError(f"non-integer index in {{{block_text}}}") from e
    leftover = _BLOCK_RE.sub("", rest).replace(",", "").strip()
    if leftover:
        raise ConfigParseError(f"unexpected text {leftover!r} in configuration")
    return IncidenceConfig(d, tuple(blocks))


def render_config(cfg: IncidenceConfig) -> str:
    if not cfg.blocks:
        return f"({cfg.d};)"
    body = ", ".join("{" + ",".join(str(i) for i in block) + "}" for block in cfg.blocks)
    return f"({cfg.d}; {body})"


@dataclass(frozen=True)
class CurveType:
    """Multiplicity type (d; m0 >= m1 >= ... >= 2) of a union of lines."""

    d: int
    mults: Tuple[int, ...] = field(default=())

    def __post_init__(self):
        mults = tuple(sorted((int(m) for m in self.mults), reverse=True))
        if any(m < 2 for m in mults):
            raise InconsistentTypeError(f"multiplicities must be >= 2, got {mults}")
        if mults and mults[0] > self.d:
            raise InconsistentTypeError(f"m0 = {mults[0]} exceeds d = {self.d}")
        if sum(comb(m, 2) for m in mults) > comb(self.d, 2):
            raise InconsistentTypeError(f"type ({self.d}; {mults}) consumes too many pairs of lines")
        object.__setattr__(self, "mults", mults)

    def m(self, i: int) -> int:
        """m_i, padded with 1 past the listed points."""
        return self.mults[i] if i < len(self.mults) else 1

    @property
    def m0(self) -> int:
        return self.m(0)

    def high_mults(self) -> Tuple[int, ...]:
        return tuple(m for m in self.mults if m >= 3)

    def render(self) -> str:
        if not self.mults:
            return f"({self.d};)"
        groups: List[Tuple[int, int]] = []
        for m in self.mults:
            if groups and groups[-1][0] == m:
                groups[-1] = (m, groups[-1][1] + 1)
            else:
                groups.append((m, 1))
        parts = []
        for m, count in groups:
            if m == 2 or count >= 2:
                parts.append(f"{m}^{count}" if count > 1 else str(m))
            else:
                parts.append(str(m))
        return f"({self.d}; " + ", ".join(parts) + ")"

    def __str__(self) -> str:
        return self.render()


def parse_type(text: str) -> CurveType:
    """Parse ``(d; m0, m1^k, ...)``."""
    match = re.match(r"^\(\s*(\d+)\s*;\s*(.*)\)$", text.strip())
    if not match:
        raise ConfigParseError(f"malformed type: {text!r}")
    d = int(match.group(1))
    mults: List[int] = []
    for item in [s.strip() for s in match.group(2).split(",") if s.strip()]:
        base, _, exponent = item.partition("^")
        try:
            mults.extend([int(base)] * (int(exponent.strip("{}")) if exponent else 1))
        except ValueError as e:
            raise ConfigParseError(f"bad multiplicity {item!r}") from e
    return CurveType(d, tuple(mults))


def type_of(cfg: IncidenceConfig) -> CurveType:
    sizes = [len(b) for b in cfg.blocks]
    nodes = comb(cfg.d, 2) - sum(comb(m, 2) for m in sizes)
    if nodes < 0:
        raise InconsistentTypeError(f"configuration {cfg} has a negative node count")
    return CurveType(cfg.d, tuple(sizes + [2] * nodes))


def node_count(t: CurveType) -> int:
    nodes = comb(t.d, 2) - sum(comb(m, 2) for m in t.high_mults())
    if nodes < 0:
        raise InconsistentTypeError("inconsistent type")
    return nodes


@dataclass(frozen=True)
class TypeAnalysis:
    """Numerical invariants attached to a type with d > m0."""

    h: int
    epsilon: int
    delta: int
    eta: int
    mu: int
    nu: int
    tau: int
    m: int
    k: Optional[int]
    l: int

    def as_dict(self) -> Dict[str, Optional[int]]:
        return {
            "h": self.h,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "eta": self.eta,
            "mu": self.mu,
            "nu": self.nu,
            "tau": self.tau,
            "m": self.m,
            "k": self.k,
            "l": self.l,
        }


def analyze(t: CurveType) -> TypeAnalysis:
    """
    Invariants h, epsilon, delta, eta, mu, nu, tau, m, k, l.

    k is the last index i with m_i = m_2 (m0 has index 0), so the
    multiplicities m_2..m_k are equal; l counts the entries equal to
    m_2 - 1 right after them. k is None when m_2 is a padding 1.

    Raises:
        PencilCaseError: when d = m0.
    """
    m0 = t.m0
    if t.d - m0 <= 0:
        raise PencilCaseError()
    h, epsilon = divmod(t.d - m0, 2)
    delta, eta = divmod(t.d, 3)
    mu = m0 - delta
    nu, tau = divmod(mu, 2)
    m2 = t.m(2)
    k: Optional[int] = None
    l = 0
    if len(t.mults) > 2:
        k = 2
        while k + 1 < len(t.mults) and t.mults[k + 1] == m2:
            k += 1
        idx = k + 1
        while idx < len(t.mults) and t.mults[idx] == m2 - 1:
            l += 1
            idx += 1
    analysis = TypeAnalysis(h, epsilon, delta, eta, mu, nu, tau, m0 + t.m(1) + m2, k, l)
    logger.debug(f"analyze {t}: {analysis.as_dict()}")
    return analysis


def numerical_conditions(t: CurveType) -> Dict[str, bool]:
    """
    Necessary numerical conditions for vanishing adjoints when h >= 1:
    m0 > d/3, m1 > h and m2 > h, m0 + m1 + m2 >= d + 1.
    """
    a = analyze(t)
    return {
        "m0_exceeds_third": 3 * t.m0 > t.d,
        "m1_m2_exceed_h": t.m(1) > a.h and t.m(2) > a.h,
        "m_at_least_d_plus_1": a.m >= t.d + 1,
    }
