from fractions import Fraction

import pytest

from src.models.errors import CoincidentLinesError, ConfigParseError, DegenerateInputError, DegreeMismatchError
from src.services.geometry.polynomial import HomPoly
from src.services.geometry.projective import (
    ProjLine,
    ProjPoint,
    Projectivity,
    collinear,
    concurrent,
    incident,
    join,
    meet,
    random_line_through,
    random_point,
    random_point_on_line,
    to_rational,
)


class TestProjective:
    def test_canonical_form_makes_projective_equality_plain_equality(self):
        assert ProjPoint.of(2, 4, 6) == ProjPoint.of(1, 2, 3)
        assert ProjPoint.of("1/2", 1, 0).to_strings() == ["1", "2", "0"]
        assert ProjLine.of(0, -3, 6) == ProjLine.of(0, 1, -2)

    def test_zero_vector_is_rejected(self):
        with pytest.raises(DegenerateInputError):
            ProjPoint.of(0, 0, 0)

    def test_rational_parsing(self):
        assert to_rational("-3/6") == Fraction(-1, 2)
        with pytest.raises(ConfigParseError):
            to_rational("1/0")
        with pytest.raises(ConfigParseError):
            to_rational("x")

    def test_meet_and_join(self):
        assert meet(ProjLine.of(1, 0, 0), ProjLine.of(0, 1, 0)) == ProjPoint.of(0, 0, 1)
        assert join(ProjPoint.of(1, 0, 0), ProjPoint.of(0, 1, 0)) == ProjLine.of(0, 0, 1)
        with pytest.raises(CoincidentLinesError):
            meet(ProjLine.of(1, 2, 3), ProjLine.of(2, 4, 6))
        with pytest.raises(DegenerateInputError):
            join(ProjPoint.of(1, 1, 1), ProjPoint.of(3, 3, 3))

    def test_collinear_and_concurrent(self):
        assert collinear(ProjPoint.of(1, 0, 0), ProjPoint.of(0, 1, 0), ProjPoint.of(1, 1, 0))
        assert not collinear(ProjPoint.of(1, 0, 0), ProjPoint.of(0, 1, 0), ProjPoint.of(0, 0, 1))
        assert concurrent(ProjLine.of(1, 0, 0), ProjLine.of(0, 1, 0), ProjLine.of(1, 1, 0))

    def test_string_round_trip(self):
        p = ProjPoint.of("3/7", -2, 5)
        assert ProjPoint.from_strings(p.to_strings()) == p

    def test_projectivity_frame_and_inverse(self, frame_points):
        p, q, r = frame_points[3], frame_points[4], ProjPoint.of(3, -5, 7)
        T = Projectivity.frame(p, q, r)
        assert T.apply(ProjPoint.of(1, 0, 0)) == p
        assert T.apply(ProjPoint.of(0, 0, 1)) == r
        x = ProjPoint.of(2, -9, 4)
        assert T.inverse().apply(T.apply(x)) == x

    def test_projectivity_preserves_incidence(self, rng):
        T = Projectivity(((1, 2, 0), (0, 1, -3), (5, 0, 1)))
        for _ in range(10):
            line = ProjLine(random_point(rng, 20).coords)
            p = random_point_on_line(line, rng, 20)
            assert incident(T.apply(p), T.apply_line(line))

    def test_singular_matrix_rejected(self):
        with pytest.raises(DegenerateInputError):
            Projectivity(((1, 2, 3), (2, 4, 6), (0, 0, 1)))

    def test_random_helpers_respect_incidence(self, rng):
        p = random_point(rng, 50)
        line = random_line_through(p, rng, 50)
        assert incident(p, line)
        assert incident(random_point_on_line(line, rng, 50), line)


class TestHomPoly:
    def test_line_form_vanishes_on_its_line(self, rng):
        line = ProjLine.of(3, -1, 4)
        f = HomPoly.from_line(line)
        for _ in range(5):
            assert f.evaluate(random_point_on_line(line, rng, 30)) == 0

    def test_multiplicity(self):
        xy = HomPoly(2, {(1, 1, 0): 1})
        assert xy.multiplicity_at(ProjPoint.of(0, 0, 1)) == 2
        assert xy.multiplicity_at(ProjPoint.of(1, 0, 0)) == 1
        assert xy.multiplicity_at(ProjPoint.of(1, 1, 1)) == 0

    def test_arithmetic(self):
        x, y = HomPoly.variable(0), HomPoly.variable(1)
        square = (x + y) ** 2
        assert square == HomPoly(2, {(2, 0, 0): 1, (1, 1, 0): 2, (0, 2, 0): 1})
        assert (square * 3).equivalent(square)
        with pytest.raises(DegreeMismatchError):
            x + square

    def test_string_round_trip(self):
        f = HomPoly(3, {(3, 0, 0): Fraction(1, 2), (0, 1, 2): -7})
        assert HomPoly.from_strings(3, f.to_strings()) == f

    def test_factor_list_of_a_product_of_lines(self):
        a, b = HomPoly.from_line(ProjLine.of(1, 1, 0)), HomPoly.from_line(ProjLine.of(0, 1, -2))
        factors = (a**2 * b).factor_list()
        assert sorted(k for _, k in factors) == [1, 2]
        assert any(f.equivalent(a) for f, k in factors if k == 2)
