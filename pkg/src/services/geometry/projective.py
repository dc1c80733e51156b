"""
Exact rational points, lines and projectivities of the projective plane.

Every coordinate is a ``fractions.Fraction``; no floating point is used.
Points and lines are stored in canonical form (first nonzero coordinate
equal to 1) so that projective equality is plain tuple equality.
"""

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, List, Sequence, Tuple, Union

from src.models.errors import CoincidentLinesError, ConfigParseError, DegenerateInputError

Rational = Fraction
Triple = Tuple[Fraction, Fraction, Fraction]
RationalLike = Union[int, str, Fraction]


def to_rational(value: RationalLike) -> Fraction:
    """Parse an int, Fraction or ``"p/q"`` string into a reduced Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ConfigParseError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                num, den = text.split("/", 1)
                return Fraction(int(num), int(den))
            return Fraction(int(text))
        except (ValueError, ZeroDivisionError) as e:
            raise ConfigParseError(f"not a rational: {value!r}") from e
    raise ConfigParseError(f"not a rational: {value!r}")


def rational_str(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def canonical_triple(values: Iterable[RationalLike]) -> Triple:
    """Scale so that the first nonzero entry is 1."""
    vec = tuple(to_rational(v) for v in values)
    if len(vec) != 3:
        raise DegenerateInputError(f"expected 3 homogeneous coordinates, got {len(vec)}")
    for v in vec:
        if v != 0:
            return tuple(c / v for c in vec)  # type: ignore[return-value]
    raise DegenerateInputError("all homogeneous coordinates are zero")


def primitive_integer(values: Sequence[Fraction]) -> Tuple[int, int, int]:
    """Integer representative with gcd 1 and the same canonical sign."""
    lcm = 1
    for v in values:
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    ints = [int(v * lcm) for v in values]
    g = 0
    for i in ints:
        g = math.gcd(g, i)
    g = g or 1
    ints = [i // g for i in ints]
    first = next((i for i in ints if i != 0), 1)
    if first < 0:
        ints = [-i for i in ints]
    return ints[0], ints[1], ints[2]


def cross(u: Sequence[Fraction], v: Sequence[Fraction]) -> Triple:
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def det3(a: Sequence[Fraction], b: Sequence[Fraction], c: Sequence[Fraction]) -> Fraction:
    return dot(a, cross(b, c))


@dataclass(frozen=True, order=True)
class ProjPoint:
    """A point [x:y:z] in canonical form."""

    coords: Triple

    def __post_init__(self):
        object.__setattr__(self, "coords", canonical_triple(self.coords))

    @classmethod
    def of(cls, x: RationalLike, y: RationalLike, z: RationalLike) -> "ProjPoint":
        return cls((x, y, z))  # type: ignore[arg-type]

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.coords)

    def __getitem__(self, index: int) -> Fraction:
        return self.coords[index]

    @property
    def integer_coords(self) -> Tuple[int, int, int]:
        return primitive_integer(self.coords)

    def to_strings(self) -> List[str]:
        return [rational_str(c) for c in self.coords]

    @classmethod
    def from_strings(cls, values: Sequence[RationalLike]) -> "ProjPoint":
        return cls(tuple(values))  # type: ignore[arg-type]

    def __str__(self) -> str:
        return "[" + ":".join(self.to_strings()) + "]"


@dataclass(frozen=True, order=True)
class ProjLine:
    """A line a*x + b*y + c*z = 0 in canonical dual coordinates."""

    coeffs: Triple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", canonical_triple(self.coeffs))

    @classmethod
    def of(cls, a: RationalLike, b: RationalLike, c: RationalLike) -> "ProjLine":
        return cls((a, b, c))  # type: ignore[arg-type]

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.coeffs)

    def __getitem__(self, index: int) -> Fraction:
        return self.coeffs[index]

    @property
    def integer_coeffs(self) -> Tuple[int, int, int]:
        return primitive_integer(self.coeffs)

    def contains(self, p: ProjPoint) -> bool:
        return incident(p, self)

    def point_pair(self) -> Tuple[ProjPoint, ProjPoint]:
        """Two distinct points spanning the line."""
        a, b, c = self.coeffs
        candidates = [(b, -a, Fraction(0)), (c, Fraction(0), -a), (Fraction(0), c, -b)]
        vectors = [v for v in candidates if any(x != 0 for x in v)]
        first = vectors[0]
        for v in vectors[1:]:
            if any(x != 0 for x in cross(first, v)):
                return ProjPoint(first), ProjPoint(v)
        raise DegenerateInputError(f"cannot span line {self}")  # pragma: no cover

    def to_strings(self) -> List[str]:
        return [rational_str(c) for c in self.coeffs]

    @classmethod
    def from_strings(cls, values: Sequence[RationalLike]) -> "ProjLine":
        return cls(tuple(values))  # type: ignore[arg-type]

    def __str__(self) -> str:
        return "<" + ":".join(self.to_strings()) + ">"


def incident(p: ProjPoint, line: ProjLine) -> bool:
    return dot(p.coords, line.coeffs) == 0


def meet(l1: ProjLine, l2: ProjLine) -> ProjPoint:
    v = cross(l1.coeffs, l2.coeffs)
    if all(c == 0 for c in v):
        raise CoincidentLinesError()
    return ProjPoint(v)


def join(p: ProjPoint, q: ProjPoint) -> ProjLine:
    v = cross(p.coords, q.coords)
    if all(c == 0 for c in v):
        raise DegenerateInputError(f"coincident points {p}")
    return ProjLine(v)


def collinear(p: ProjPoint, q: ProjPoint, r: ProjPoint) -> bool:
    return det3(p.coords, q.coords, r.coords) == 0


def concurrent(l1: ProjLine, l2: ProjLine, l3: ProjLine) -> bool:
    return det3(l1.coeffs, l2.coeffs, l3.coeffs) == 0


Matrix3 = Tuple[Triple, Triple, Triple]


class Projectivity:
    """
    Invertible 3x3 rational matrix acting on points by X -> M X.

    Lines transform by the inverse transpose so that incidence is preserved.
    """

    def __init__(self, rows: Sequence[Sequence[RationalLike]]):
        self.rows: Matrix3 = tuple(tuple(to_rational(v) for v in row) for row in rows)  # type: ignore[assignment]
        if len(self.rows) != 3 or any(len(r) != 3 for r in self.rows):
            raise DegenerateInputError("projectivity needs a 3x3 matrix")
        self.det = det3(*self.rows)
        if self.det == 0:
            raise DegenerateInputError("singular projectivity")

    @classmethod
    def identity(cls) -> "Projectivity":
        return cls(((1, 0, 0), (0, 1, 0), (0, 0, 1)))

    @classmethod
    def from_columns(cls, p: Sequence[Fraction], q: Sequence[Fraction], r: Sequence[Fraction]) -> "Projectivity":
        """Matrix whose columns are p, q, r (sends e1, e2, e3 to them)."""
        return cls(tuple((p[i], q[i], r[i]) for i in range(3)))

    @classmethod
    def frame(cls, p: ProjPoint, q: ProjPoint, r: ProjPoint) -> "Projectivity":
        if collinear(p, q, r):
            raise DegenerateInputError(f"collinear frame points {p}, {q}, {r}")
        return cls.from_columns(p.coords, q.coords, r.coords)

    @classmethod
    def centering(cls, center: ProjPoint) -> "Projectivity":
        """A projectivity T with T(center) = [0:0:1]."""
        units = [ProjPoint.of(1, 0, 0), ProjPoint.of(0, 1, 0), ProjPoint.of(0, 0, 1)]
        for u in units:
            for v in units:
                if u < v and not collinear(u, v, center):
                    return cls.frame(u, v, center).inverse()
        raise DegenerateInputError(f"cannot center at {center}")  # pragma: no cover

    def inverse(self) -> "Projectivity":
        r0, r1, r2 = self.rows
        # columns of the inverse are cross products of pairs of rows
        adj_cols = [cross(r1, r2), cross(r2, r0), cross(r0, r1)]
        inv = tuple(tuple(adj_cols[j][i] / self.det for j in range(3)) for i in range(3))
        return Projectivity(inv)

    def apply_vector(self, v: Sequence[Fraction]) -> Triple:
        return tuple(dot(row, v) for row in self.rows)  # type: ignore[return-value]

    def apply(self, p: ProjPoint) -> ProjPoint:
        return ProjPoint(self.apply_vector(p.coords))

    def apply_line(self, line: ProjLine) -> ProjLine:
        inv = self.inverse().rows
        return ProjLine(tuple(sum(inv[i][j] * line.coeffs[i] for i in range(3)) for j in range(3)))

    def compose(self, other: "Projectivity") -> "Projectivity":
        """self o other."""
        a, b = self.rows, other.rows
        return Projectivity(
            tuple(tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)) for i in range(3))
        )

    def __repr__(self) -> str:
        return f"Projectivity({[[rational_str(v) for v in row] for row in self.rows]})"


def random_rational(rng: random.Random, bound: int) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def random_point(rng: random.Random, bound: int) -> ProjPoint:
    while True:
        vec = (random_rational(rng, bound), random_rational(rng, bound), random_rational(rng, bound))
        if any(v != 0 for v in vec):
            return ProjPoint(vec)


def random_line(rng: random.Random, bound: int) -> ProjLine:
    return ProjLine(random_point(rng, bound).coords)


def random_line_through(p: ProjPoint, rng: random.Random, bound: int) -> ProjLine:
    while True:
        q = random_point(rng, bound)
        if q != p:
            return join(p, q)


def random_point_on_line(line: ProjLine, rng: random.Random, bound: int) -> ProjPoint:
    u, v = line.point_pair()
    while True:
        s, t = random_rational(rng, bound), random_rational(rng, bound)
        vec = tuple(s * a + t * b for a, b in zip(u.coords, v.coords))
        if any(c != 0 for c in vec):
            return ProjPoint(vec)
