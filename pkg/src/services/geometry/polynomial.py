"""
Sparse homogeneous polynomials in x, y, z over the rationals.

Terms are kept in a dict ``{(i, j, k): Fraction}``; every exponent triple sums
to the degree and zero coefficients are never stored. Arithmetic that is
plain bookkeeping (sums, products, substitution, evaluation) is done here;
gcd, exact division and factorization are delegated to ``sympy.Poly`` over QQ.

Binary forms (parametrizations of curves) are HomPoly values that do not
involve z.
"""

import logging
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import sympy
from sympy import QQ, Poly

from src.models.errors import DegenerateInputError, DegreeMismatchError
from src.services.geometry.projective import (
    ProjLine,
    ProjPoint,
    Projectivity,
    RationalLike,
    rational_str,
    to_rational,
)

logger = logging.getLogger(__name__)

Exponent = Tuple[int, int, int]
Terms = Dict[Exponent, Fraction]

X, Y, Z = sympy.symbols("x y z")
GENS = (X, Y, Z)
_NAMES = ("x", "y", "z")


def falling(n: int, k: int) -> int:
    """n (n-1) ... (n-k+1); zero when k > n."""
    if k > n:
        return 0
    out = 1
    for t in range(k):
        out *= n - t
    return out


def exponents_of_degree(degree: int) -> List[Exponent]:
    """All (i, j, k) with i + j + k = degree, in lexicographically descending order."""
    if degree < 0:
        return []
    return [(i, j, degree - i - j) for i in range(degree, -1, -1) for j in range(degree - i, -1, -1)]


def _mul_terms(a: Terms, b: Terms, zmax: Optional[int] = None) -> Terms:
    out: Terms = {}
    for (i1, j1, k1), c1 in a.items():
        for (i2, j2, k2), c2 in b.items():
            k = k1 + k2
            if zmax is not None and k >= zmax:
                continue
            key = (i1 + i2, j1 + j2, k)
            out[key] = out.get(key, 0) + c1 * c2
    return {e: c for e, c in out.items() if c != 0}


class HomPoly:
    """A homogeneous form of fixed degree with sparse rational coefficients."""

    __slots__ = ("degree", "terms")

    def __init__(self, degree: int, terms: Optional[Mapping[Sequence[int], RationalLike]] = None):
        if degree < 0:
            raise DegreeMismatchError(f"negative degree {degree}")
        clean: Terms = {}
        for exp, coeff in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != 3 or min(exp) < 0 or sum(exp) != degree:
                raise DegreeMismatchError(f"exponent {exp} does not have degree {degree}")
            value = to_rational(coeff)
            if value != 0:
                clean[exp] = clean.get(exp, 0) + value  # type: ignore[assignment]
        self.degree = degree
        self.terms: Terms = {e: c for e, c in clean.items() if c != 0}

    @classmethod
    def _raw(cls, degree: int, terms: Terms) -> "HomPoly":
        obj = cls.__new__(cls)
        obj.degree = degree
        obj.terms = terms
        return obj

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def zero(cls, degree: int = 0) -> "HomPoly":
        return cls._raw(degree, {})

    @classmethod
    def constant(cls, value: RationalLike = 1) -> "HomPoly":
        return cls(0, {(0, 0, 0): value})

    @classmethod
    def variable(cls, index: int) -> "HomPoly":
        exp = [0, 0, 0]
        exp[index] = 1
        return cls._raw(1, {tuple(exp): Fraction(1)})  # type: ignore[dict-item]

    @classmethod
    def linear(cls, coeffs: Sequence[RationalLike]) -> "HomPoly":
        a, b, c = coeffs
        return cls(1, {(1, 0, 0): a, (0, 1, 0): b, (0, 0, 1): c})

    @classmethod
    def from_line(cls, line: ProjLine) -> "HomPoly":
        return cls.linear(line.coeffs)

    @classmethod
    def from_coefficients(cls, degree: int, basis: Sequence[Exponent], values: Sequence[RationalLike]) -> "HomPoly":
        return cls(degree, dict(zip(basis, values)))

    # ------------------------------------------------------------------
    # predicates

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return self.degree == 0

    def variables_used(self) -> Tuple[bool, bool, bool]:
        used = [False, False, False]
        for exp in self.terms:
            for idx in range(3):
                if exp[idx]:
                    used[idx] = True
        return used[0], used[1], used[2]

    # ------------------------------------------------------------------
    # arithmetic

    def _check_same_degree(self, other: "HomPoly") -> None:
        if self.degree != other.degree and not (self.is_zero() or other.is_zero()):
            raise DegreeMismatchError(f"degrees {self.degree} and {other.degree} differ")

    def __add__(self, other: "HomPoly") -> "HomPoly":
        self._check_same_degree(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        degree = self.degree if not self.is_zero() else other.degree
        return HomPoly._raw(degree, {e: c for e, c in out.items() if c != 0})

    def __neg__(self) -> "HomPoly":
        return HomPoly._raw(self.degree, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "HomPoly") -> "HomPoly":
        return self + (-other)

    def scale(self, value: RationalLike) -> "HomPoly":
        value = to_rational(value)
        if value == 0:
            return HomPoly.zero(self.degree)
        return HomPoly._raw(self.degree, {e: c * value for e, c in self.terms.items()})

    def __mul__(self, other: Union["HomPoly", RationalLike]) -> "HomPoly":
        if isinstance(other, HomPoly):
            return HomPoly._raw(self.degree + other.degree, _mul_terms(self.terms, other.terms))
        return self.scale(other)

    def __rmul__(self, other: RationalLike) -> "HomPoly":
        return self.scale(other)

    def __pow__(self, exponent: int) -> "HomPoly":
        if exponent < 0:
            raise ValueError("negative power of a form")
        result = HomPoly.constant(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def mul_truncated(self, other: "HomPoly", zmax: int) -> "HomPoly":
        """Product keeping only terms whose z-exponent is below ``zmax``."""
        return HomPoly._raw(self.degree + other.degree, _mul_terms(self.terms, other.terms, zmax))

    def truncate(self, zmax: int) -> "HomPoly":
        return HomPoly._raw(self.degree, {e: c for e, c in self.terms.items() if e[2] < zmax})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HomPoly):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return self.degree == other.degree and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.degree, frozenset(self.terms.items())))

    # ------------------------------------------------------------------
    # evaluation and substitution

    def evaluate(self, point: Union[ProjPoint, Sequence[RationalLike]]) -> Fraction:
        coords = point.coords if isinstance(point, ProjPoint) else tuple(to_rational(v) for v in point)
        total = Fraction(0)
        for (i, j, k), c in self.terms.items():
            total += c * coords[0] ** i * coords[1] ** j * coords[2] ** k
        return total

    def substitute(self, g1: "HomPoly", g2: "HomPoly", g3: "HomPoly", zmax: Optional[int] = None) -> "HomPoly":
        return substitute(self, g1, g2, g3, zmax=zmax)

    def linear_change(self, proj: Projectivity) -> "HomPoly":
        """The form X -> self(M X)."""
        rows = [HomPoly.linear(row) for row in proj.rows]
        return substitute(self, *rows)

    def derivative(self, index: int) -> "HomPoly":
        if self.degree == 0:
            return HomPoly.zero(0)
        out: Terms = {}
        for exp, c in self.terms.items():
            if exp[index] == 0:
                continue
            new = list(exp)
            new[index] -= 1
            out[tuple(new)] = c * exp[index]  # type: ignore[index]
        return HomPoly._raw(self.degree - 1, out)

    def vanishes_to_order(self, point: ProjPoint, order: int) -> bool:
        """True iff every partial derivative of order ``order - 1`` vanishes at ``point``."""
        if order <= 0 or self.is_zero():
            return True
        if order > self.degree:
            return False
        a, b, c = point.integer_coords
        powers = [[v**e for e in range(self.degree + 1)] for v in (a, b, c)]
        d = order - 1
        for alpha in range(d + 1):
            for beta in range(d - alpha + 1):
                gamma = d - alpha - beta
                total = Fraction(0)
                for (i, j, k), coeff in self.terms.items():
                    if i < alpha or j < beta or k < gamma:
                        continue
                    total += (
                        coeff
                        * falling(i, alpha)
                        * falling(j, beta)
                        * falling(k, gamma)
                        * powers[0][i - alpha]
                        * powers[1][j - beta]
                        * powers[2][k - gamma]
                    )
                if total != 0:
                    return False
        return True

    def multiplicity_at(self, point: ProjPoint) -> int:
        if self.is_zero():
            raise DegenerateInputError("multiplicity of the zero form")
        m = 0
        while m < self.degree and self.vanishes_to_order(point, m + 1):
            m += 1
        return m

    # ------------------------------------------------------------------
    # normal forms

    def leading_exponent(self) -> Exponent:
        return max(self.terms)

    def normalized(self) -> "HomPoly":
        """Scaled so that the lexicographically largest term has coefficient 1."""
        if self.is_zero():
            return self
        return self.scale(1 / self.terms[self.leading_exponent()])

    def equivalent(self, other: "HomPoly") -> bool:
        """Equal up to a nonzero scalar."""
        return self.normalized() == other.normalized()

    # ------------------------------------------------------------------
    # sympy bridge

    def to_sympy(self) -> Poly:
        data = {e: sympy.Rational(c.numerator, c.denominator) for e, c in self.terms.items()}
        if not data:
            return Poly(0, *GENS, domain=QQ)
        return Poly.from_dict(data, *GENS, domain=QQ)

    @classmethod
    def from_sympy(cls, poly: Poly, degree: Optional[int] = None) -> "HomPoly":
        terms: Terms = {}
        for monom, coeff in poly.terms():
            if coeff == 0:
                continue
            coeff = sympy.Rational(coeff)
            terms[tuple(int(e) for e in monom)] = Fraction(int(coeff.p), int(coeff.q))  # type: ignore[index]
        if degree is None:
            degree = sum(next(iter(terms))) if terms else 0
        return cls(degree, terms)

    def divide_out(self, g: "HomPoly") -> Tuple["HomPoly", int]:
        return divide_out(self, g)

    def exact_div(self, g: "HomPoly") -> "HomPoly":
        quotient, remainder = self.to_sympy().div(g.to_sympy())
        if not remainder.is_zero:
            raise DegenerateInputError("form is not divisible")
        return HomPoly.from_sympy(quotient, self.degree - g.degree)

    def gcd(self, other: "HomPoly") -> "HomPoly":
        g = self.to_sympy().gcd(other.to_sympy())
        return HomPoly.from_sympy(g, g.total_degree()).normalized()

    def factor_list(self) -> List[Tuple["HomPoly", int]]:
        """Irreducible factors over QQ with multiplicities (normalized, constants dropped)."""
        if self.is_zero():
            raise DegenerateInputError("cannot factor the zero form")
        _, factors = self.to_sympy().factor_list()
        out = []
        for factor, mult in factors:
            deg = factor.total_degree()
            if deg == 0:
                continue
            out.append((HomPoly.from_sympy(factor, deg).normalized(), int(mult)))
        return sorted(out, key=lambda fm: (fm[0].degree, sorted(fm[0].terms.items())))

    # ------------------------------------------------------------------
    # serialization

    def to_strings(self) -> List[List[Union[int, str]]]:
        return [[i, j, k, rational_str(c)] for (i, j, k), c in sorted(self.terms.items(), reverse=True)]

    @classmethod
    def from_strings(cls, degree: int, rows: Iterable[Sequence[Union[int, str]]]) -> "HomPoly":
        return cls(degree, {(int(r[0]), int(r[1]), int(r[2])): to_rational(r[3]) for r in rows})

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for exp, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(
                (_NAMES[i] if e == 1 else f"{_NAMES[i]}^{e}") for i, e in enumerate(exp) if e
            )
            coeff = rational_str(c)
            if not mono:
                parts.append(coeff)
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{coeff}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"HomPoly({self.degree}, {self})"


def substitute(f: HomPoly, g1: HomPoly, g2: HomPoly, g3: HomPoly, zmax: Optional[int] = None) -> HomPoly:
    """f(g1, g2, g3); optional truncation of z-exponents at ``zmax``."""
    if not (g1.degree == g2.degree == g3.degree):
        raise DegreeMismatchError("mismatched degrees in substitute")
    gens = (g1.terms, g2.terms, g3.terms)
    powers: List[List[Terms]] = [[{(0, 0, 0): Fraction(1)}] for _ in range(3)]

    def power(idx: int, e: int) -> Terms:
        table = powers[idx]
        while len(table) <= e:
            table.append(_mul_terms(table[-1], gens[idx], zmax))
        return table[e]

    xy_cache: Dict[Tuple[int, int], Terms] = {}
    result: Terms = {}
    for (i, j, k), c in f.terms.items():
        if (i, j) not in xy_cache:
            xy_cache[(i, j)] = _mul_terms(power(0, i), power(1, j), zmax)
        term = _mul_terms(xy_cache[(i, j)], power(2, k), zmax)
        for e, v in term.items():
            result[e] = result.get(e, 0) + c * v
    return HomPoly._raw(f.degree * g1.degree, {e: v for e, v in result.items() if v != 0})


def eval_poly(f: HomPoly, p: ProjPoint) -> Fraction:
    return f.evaluate(p)


def divide_out(f: HomPoly, g: HomPoly) -> Tuple[HomPoly, int]:
    """Largest k with g^k | f and the exact quotient f / g^k."""
    if g.degree == 0:
        raise DegenerateInputError("divide_out requires a nonconstant divisor")
    if f.is_zero():
        raise DegenerateInputError("divide_out of the zero form")
    current = f.to_sympy()
    divisor = g.to_sympy()
    k = 0
    while current.total_degree() >= g.degree:
        quotient, remainder = current.div(divisor)
        if not remainder.is_zero:
            break
        current = quotient
        k += 1
    return HomPoly.from_sympy(current, f.degree - k * g.degree), k


def gcd_many(forms: Sequence[HomPoly]) -> HomPoly:
    nonzero = [f for f in forms if not f.is_zero()]
    if not nonzero:
        raise DegenerateInputError("gcd of zero forms")
    g = nonzero[0].to_sympy()
    for f in nonzero[1:]:
        g = g.gcd(f.to_sympy())
        if g.total_degree() == 0:
            break
    return HomPoly.from_sympy(g, g.total_degree()).normalized()


def jacobian_determinant(f1: HomPoly, f2: HomPoly, f3: HomPoly) -> HomPoly:
    rows = [[f.derivative(i) for i in range(3)] for f in (f1, f2, f3)]
    det = (
        rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
        - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
        + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0])
    )
    return det


def binary_param(p: ProjPoint, q: ProjPoint) -> Tuple[HomPoly, HomPoly, HomPoly]:
    """s*p + t*q as three binary linear forms in (x, y) = (s, t)."""
    return tuple(HomPoly(1, {(1, 0, 0): p.coords[i], (0, 1, 0): q.coords[i]}) for i in range(3))  # type: ignore[return-value]
