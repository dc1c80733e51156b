from fractions import Fraction

import pytest

from src.models.errors import AdjointIndexError
from src.services.cache.cache_service import CacheService
from src.services.configuration.curve_type import parse_type
from src.services.configuration.families import CONTRACTIBLE_GROUP, THEOREM_FAMILIES, FamilyTag
from src.services.cremona.maps import quadratic_map
from src.services.cremona.pushforward import apply_to_arrangement
from src.services.geometry.projective import ProjPoint, collinear, incident, meet, random_point
from src.services.linear_systems.adjoints import (
    adjoint_dim,
    adjoint_sequence,
    adjoint_spec,
    adjoint_type,
    kodaira_bounded,
    log_plurigenus,
    theorem_agreement,
    vanishing_adjoints,
)
from src.services.linear_systems.ranks import rational_rows_to_integer
from src.services.linear_systems.system import LinearSystemSpec, actual_dim, solve_system, virtual_dim


def _spec(degree, points):
    return LinearSystemSpec.build(degree, points)


class TestSystems:
    def test_denominators_are_cleared_per_row(self):
        rows = [[Fraction(1, 2), Fraction(1, 3)], [Fraction(2), Fraction(-3, 4)], [Fraction(4, 6), Fraction(0)]]
        assert rational_rows_to_integer(rows) == [[3, 2], [8, -3], [2, 0]]

    def test_virtual_dim(self, frame_points):
        spec = _spec(2, [(p, 1) for p in frame_points])
        assert virtual_dim(spec) == 0
        assert virtual_dim(_spec(9, [(frame_points[0], 9)] + [(p, 1) for p in frame_points[1:]])) == 54 - 45 - 4

    def test_conic_through_five_points(self, frame_points):
        spec = _spec(2, [(p, 1) for p in frame_points])
        result = solve_system(spec, want_witness=True)
        assert result.dim == 0
        assert spec.is_satisfied_by(result.witness)

    def test_sixth_point_off_the_conic(self, frame_points):
        spec = _spec(2, [(p, 1) for p in frame_points] + [(ProjPoint.of(3, -5, 7), 1)])
        assert actual_dim(spec) == -1

    def test_collinear_points_fix_the_line(self):
        points = [ProjPoint.of(1, 0, 0), ProjPoint.of(0, 1, 0), ProjPoint.of(1, 1, 0)]
        assert actual_dim(_spec(1, [(p, 1) for p in points])) == 0

    def test_cone(self, frame_points):
        spec = _spec(3, [(frame_points[0], 3), (frame_points[1], 1), (frame_points[2], 1)])
        result = solve_system(spec, want_witness=True)
        assert result.dim == 1
        assert result.witness.multiplicity_at(frame_points[0]) >= 3

    def test_multiplicity_above_degree(self, frame_points):
        assert actual_dim(_spec(3, [(frame_points[0], 4)])) == -1

    def test_negative_degree(self):
        assert actual_dim(_spec(-2, [])) == -1

    def test_free_system(self):
        assert actual_dim(_spec(4, [])) == 14

    def test_special_system_beats_virtual_dim(self, frame_points):
        # two double points force the line through them twice
        spec = _spec(2, [(frame_points[0], 2), (frame_points[1], 2)])
        assert virtual_dim(spec) == -1
        assert actual_dim(spec) == 0

    def test_results_are_cached(self, frame_points):
        cache = CacheService({"cache_type": "memory", "default_ttl": 60, "max_size": 16})
        spec = _spec(2, [(p, 1) for p in frame_points[:4]])
        first = solve_system(spec, cache=cache)
        second = solve_system(spec, cache=cache)
        assert first == second
        assert cache.get_stats()["hits"] == 1

    def test_dimension_entry_is_upgraded_for_a_member(self, frame_points):
        cache = CacheService({"cache_type": "lru", "default_ttl": 0, "max_size": 16})
        spec = _spec(2, [(p, 1) for p in frame_points[:4]])
        solve_system(spec, cache=cache)
        member = solve_system(spec, want_witness=True, cache=cache).witness
        assert member is not None
        assert spec.is_satisfied_by(member)
        stats = cache.get_stats()
        assert (stats["hits"], stats["upgrades"]) == (0, 1)
        assert solve_system(spec, want_witness=True, cache=cache).witness == member


class TestAdjoints:
    def test_adjoint_type(self):
        t = parse_type("(12; 10, 3, 2^18)")
        assert adjoint_type(t, 1, 1).render() == "(9; 9, 2, 1^18)"
        assert adjoint_type(t, 1, 2).render() == "(6; 8, 1)"
        assert adjoint_type(t, 1, 2).obviously_empty

    def test_index_errors(self, realized):
        arr = realized(FamilyTag.PENCIL, 4)
        with pytest.raises(AdjointIndexError):
            adjoint_dim(arr, 2, 1)
        with pytest.raises(AdjointIndexError):
            adjoint_sequence(arr, 0)

    def test_pencil_has_vanishing_adjoints(self, realized):
        seq = adjoint_sequence(realized(FamilyTag.PENCIL, 12), 1)
        assert seq.dims == (-1,) * 5
        assert seq.first_empty_m == 1
        assert seq.stabilized

    def test_d2_triple_has_vanishing_adjoints(self, realized):
        assert vanishing_adjoints(realized(FamilyTag.D2_TRIPLE, 12))

    def test_control_does_not(self, realized):
        arr = realized(FamilyTag.CONTROL, 12)
        assert not vanishing_adjoints(arr)
        assert adjoint_dim(arr, 1, 2) >= 0

    def test_plurigenus_of_the_pencil(self, realized):
        report = log_plurigenus(realized(FamilyTag.PENCIL, 6), 2)
        assert report.value == 0
        assert report.witness is None

    def test_four_general_lines_are_negative(self, realized):
        verdict = kodaira_bounded(realized(FamilyTag.GENERAL, 4), 3)
        assert verdict.negative
        assert verdict.label == "negative_up_to(3)"
        assert [r.value for r in verdict.reports] == [0, 0, 0]

    def test_kodaira_bound_must_be_positive(self, realized):
        with pytest.raises(AdjointIndexError):
            kodaira_bounded(realized(FamilyTag.PENCIL, 4), 0)

    def test_type_table_agreement(self, realized):
        contractible = realized(FamilyTag.D2_TRIPLE, 12)
        assert theorem_agreement(contractible, 4, None) is True
        assert theorem_agreement(contractible, 4, 2) is False
        nodal = realized(FamilyTag.D3_NODAL, 12)
        assert theorem_agreement(nodal, 2, None) is None
        assert theorem_agreement(nodal, 3, None) is False
        assert theorem_agreement(nodal, 12, 3) is True
        assert theorem_agreement(realized(FamilyTag.CONTROL, 12), 3, 1) is None
        assert theorem_agreement(realized(FamilyTag.PENCIL, 6), 3, None) is None

    def test_kodaira_verdict_carries_the_agreement(self, realized):
        verdict = kodaira_bounded(realized(FamilyTag.D2_TRIPLE, 12), 2)
        assert verdict.negative
        assert verdict.agrees_with_theorem is True
        assert verdict.to_doc().agrees_with_theorem is True

    def test_small_degree_has_no_table(self, realized):
        assert kodaira_bounded(realized(FamilyTag.GENERAL, 4), 1).agrees_with_theorem is None


def _quadratic_keeping_lines(arr, rng):
    """Quadratic map at P0, a crossing of two lines missing P0, and a point off every line."""
    p0 = arr.singular_points()[0][0]
    outer = [line for line in arr.lines if not incident(p0, line)]
    node = meet(outer[0], outer[1])
    while True:
        free = random_point(rng, 30)
        if any(incident(free, line) for line in arr.lines) or collinear(p0, node, free):
            continue
        return quadratic_map(p0, node, free)


class TestAdjointInvariance:
    @pytest.mark.parametrize(
        "family, d",
        [(FamilyTag.D2_NODAL, 7), (FamilyTag.D3_NODAL, 7), (FamilyTag.D3_TRIPLE_DISJOINT, 8), (FamilyTag.CONTROL, 8)],
        ids=lambda v: getattr(v, "value", str(v)),
    )
    def test_quadratic_maps_preserve_the_sequence(self, family, d, realized, rng):
        arr = realized(family, d)
        dims = adjoint_sequence(arr, 1).dims
        for _ in range(5):
            image = apply_to_arrangement(_quadratic_keeping_lines(arr, rng), arr)
            assert not image.contracted
            assert image.survivors_are_lines()
            assert image.degree_formula_ok
            assert adjoint_sequence(image.as_arrangement(), 1).dims == dims


D3_GROUPS = [tag for tag in THEOREM_FAMILIES if tag.group != CONTRACTIBLE_GROUP]


@pytest.mark.slow
@pytest.mark.parametrize("d", [12, 13])
@pytest.mark.parametrize("family", THEOREM_FAMILIES, ids=lambda f: f.value)
def test_theorem_types_have_vanishing_adjoints(family, d, realized):
    seq = adjoint_sequence(realized(family, d), 1)
    assert seq.all_empty
    assert set(seq.dims) == {-1}


@pytest.mark.slow
@pytest.mark.parametrize("family", D3_GROUPS, ids=lambda f: f.value)
def test_d3_groups_have_a_third_plurigenus(family, realized):
    arr = realized(family, 12)
    report = log_plurigenus(arr, 3)
    assert report.value > 0
    assert report.witness is not None
    assert adjoint_spec(arr, 3, 3).is_satisfied_by(report.witness)
    verdict = kodaira_bounded(arr, 3)
    assert verdict.witness_m is not None and verdict.witness_m <= 3
    assert verdict.agrees_with_theorem is True
