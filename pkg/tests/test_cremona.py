import pytest

from src.models.errors import DegenerateInputError
from src.services.configuration.arrangement import LineArrangement
from src.services.cremona.maps import (
    CremonaMap,
    dejonquieres_map,
    identity_map,
    quadratic_map,
    quadratic_map_tangent,
)
from src.services.cremona.pushforward import apply_to_arrangement, compose, push_forward
from src.services.geometry.polynomial import HomPoly
from src.services.geometry.projective import ProjLine, ProjPoint, incident, join, random_line, random_point

E1, E2, E3 = ProjPoint.of(1, 0, 0), ProjPoint.of(0, 1, 0), ProjPoint.of(0, 0, 1)


@pytest.fixture
def standard():
    return quadratic_map(E1, E2, E3)


class TestQuadratic:
    def test_standard_involution(self, standard):
        assert standard.evaluate(ProjPoint.of(1, 2, 3)) == ProjPoint.of(6, 3, 2)
        assert standard.homaloidal_ok()

    def test_involution_on_random_points(self, rng):
        cmap = quadratic_map(ProjPoint.of(1, 2, 3), ProjPoint.of(-2, 1, 5), ProjPoint.of(4, 0, 1))
        checked = 0
        while checked < 20:
            p = random_point(rng, 40)
            image = cmap.evaluate(p)
            if image is None or cmap.evaluate(image) is None:
                continue
            assert cmap.evaluate(image) == p
            checked += 1

    def test_involution_on_random_lines(self, standard, rng):
        checked = 0
        while checked < 20:
            line = random_line(rng, 40)
            if any(incident(p, line) for p in (E1, E2, E3)):
                continue
            form = HomPoly.from_line(line)
            conic = push_forward(standard, form)
            assert conic.degree == 2
            assert all(conic.multiplicity_at(p) == 1 for p in (E1, E2, E3))
            assert push_forward(standard, conic).equivalent(form)
            checked += 1

    def test_base_points_have_no_image(self, standard):
        for p in (E1, E2, E3):
            assert standard.evaluate(p) is None
            assert standard.is_base_point(p)

    def test_collinear_base_points(self):
        with pytest.raises(DegenerateInputError):
            quadratic_map(E1, E2, ProjPoint.of(1, 1, 0))

    def test_triangle_is_contracted(self, standard, triangle):
        image = apply_to_arrangement(standard, triangle)
        assert image.all_contracted
        assert dict(image.contracted) == {0: E1, 1: E2, 2: E3}

    def test_degree_formula(self, standard):
        arr = LineArrangement((ProjLine.of(1, -1, 0), ProjLine.of(1, 2, 3)))
        image = apply_to_arrangement(standard, arr)
        assert image.degree_formula_ok
        degrees = {idx: eq.degree for eq, idx in image.surviving}
        # x = y passes through [0:0:1] and is mapped to itself
        assert degrees == {0: 1, 1: 2}
        assert image.surviving[0][0].equivalent(arr.forms()[0])

    def test_doc_round_trip_keeps_the_map(self, standard):
        again = CremonaMap.from_doc(standard.to_doc())
        assert again.evaluate(ProjPoint.of(1, 2, 3)) == ProjPoint.of(6, 3, 2)

    def test_identity(self, triangle):
        image = apply_to_arrangement(identity_map(), triangle)
        assert image.as_arrangement() == triangle


class TestOtherMaps:
    def test_tangent_quadratic(self, rng):
        p, direction, r = E1, ProjLine.of(0, 0, 1), E3
        cmap = quadratic_map_tangent(p, direction, r)
        assert cmap.homaloidal_ok()
        assert [bp.infinitely_near for bp in cmap.base_points] == [False, True, False]
        for _ in range(5):
            x = random_point(rng, 30)
            y = cmap.evaluate(x)
            if y is not None and cmap.evaluate_inverse(y) is not None:
                assert cmap.evaluate_inverse(y) == x

    def test_tangent_rejects_third_point_on_direction(self):
        with pytest.raises(DegenerateInputError):
            quadratic_map_tangent(E1, ProjLine.of(0, 0, 1), E2)

    def test_dejonquieres_cubic(self):
        center = E3
        simples = [ProjPoint.of(1, 2, 3), ProjPoint.of(2, -1, 1), ProjPoint.of(-3, 1, 2), ProjPoint.of(1, 4, -2)]
        cmap = dejonquieres_map(center, simples)
        assert cmap.degree == 3
        assert cmap.homaloidal_ok()
        # lines through the center go to lines
        line = join(center, ProjPoint.of(5, 7, 0))
        image = apply_to_arrangement(cmap, LineArrangement((line,)))
        assert [eq.degree for eq, _ in image.surviving] == [1]

    def test_dejonquieres_needs_an_even_count(self):
        with pytest.raises(DegenerateInputError):
            dejonquieres_map(E3, [E1, E2, ProjPoint.of(1, 1, 1)])

    def test_composition_images(self, standard, triangle):
        other = quadratic_map(ProjPoint.of(1, 1, 1), ProjPoint.of(1, 2, 3), ProjPoint.of(3, 1, 2))
        steps = compose([other, standard]).images(triangle)
        assert len(steps) == 2
        for eq, _ in steps[0].surviving:
            assert eq.degree == 2
