import pytest

from src.models.errors import (
    ConfigParseError,
    CoincidentLinesError,
    InconsistentTypeError,
    PencilCaseError,
    RealizationError,
)
from src.services.configuration.arrangement import LineArrangement, config_of, type_of_arrangement
from src.services.configuration.curve_type import (
    CurveType,
    analyze,
    numerical_conditions,
    node_count,
    parse_config,
    parse_type,
    type_of,
)
from src.services.configuration.families import (
    THEOREM_FAMILIES,
    FamilyTag,
    identify_family,
    parse_family,
    random_arrangement,
    realize,
    realize_config,
)
from src.services.geometry.projective import ProjLine, ProjPoint


class TestNotation:
    def test_parse_two_triples(self):
        cfg = parse_config("(6; {1,2,3}, {1,4,5})")
        assert cfg.d == 6
        assert cfg.blocks == ((1, 2, 3), (1, 4, 5))

    def test_blocks_are_normalized(self):
        cfg = parse_config("(9;{8,1,7},{6,5,4,3,2,1})")
        assert cfg.blocks == ((1, 2, 3, 4, 5, 6), (1, 7, 8))
        assert parse_config(cfg.render()) == cfg

    def test_whitespace_insensitive(self):
        assert parse_config("( 6 ;{1, 2,3} ,{ 1,4,5 })") == parse_config("(6;{1,2,3},{1,4,5})")

    @pytest.mark.parametrize(
        "text",
        [
            "(5; {1,2})",
            "(6; {1,2,3}, {1,2,4})",
            "(4; {1,2,5})",
            "6; {1,2,3}",
        ],
    )
    def test_invalid_configs(self, text):
        with pytest.raises(ConfigParseError):
            parse_config(text)

    def test_type_of_degree9_configuration(self):
        t = type_of(parse_config("(9; {1,2,3,4,5,6}, {1,7,8})"))
        assert t == parse_type("(9; 6, 3, 2^18)")
        assert t.render() == "(9; 6, 3, 2^18)"

    def test_parse_type_exponents(self):
        t = parse_type("(12; 10, 3, 2^{18})")
        assert t.mults == (10, 3) + (2,) * 18

    def test_inconsistent_type(self):
        with pytest.raises(InconsistentTypeError):
            CurveType(4, (5,))
        with pytest.raises(InconsistentTypeError):
            CurveType(4, (4, 2))


class TestInvariants:
    def test_node_count(self):
        assert node_count(parse_type("(6; 3, 3)")) == 9
        assert node_count(CurveType(3, (2, 2, 2))) == 3
        assert node_count(CurveType(12, (12,))) == 0

    def test_analyze_d2_triple(self):
        a = analyze(parse_type("(12; 10, 3, 2^18)"))
        assert (a.h, a.epsilon, a.delta, a.eta, a.mu, a.nu, a.tau, a.m) == (1, 0, 4, 0, 6, 3, 0, 15)
        assert a.k == 19 and a.l == 0

    def test_analyze_d3_nodal(self):
        a = analyze(parse_type("(12; 9, 2^30)"))
        assert (a.h, a.epsilon, a.m) == (1, 1, 13)

    def test_analyze_identities(self):
        for text in ["(12; 8, 2^38)", "(13; 10, 4, 2^27)", "(7; 3, 3, 3, 2^12)"]:
            t = parse_type(text)
            a = analyze(t)
            assert t.d - t.m0 == 2 * a.h + a.epsilon
            assert t.d == 3 * a.delta + a.eta
            assert t.m0 == a.delta + a.mu
            assert a.mu == 2 * a.nu + a.tau

    def test_pencil_rejected(self):
        with pytest.raises(PencilCaseError):
            analyze(CurveType(12, (12,)))

    def test_numerical_conditions(self):
        assert all(numerical_conditions(parse_type("(12; 9, 2^30)")).values())
        assert not numerical_conditions(parse_type("(12; 8, 2^38)"))["m_at_least_d_plus_1"]


class TestArrangement:
    def test_concurrent_lines(self):
        arr = LineArrangement((ProjLine.of(1, 0, 0), ProjLine.of(0, 1, 0), ProjLine.of(1, 1, 0)))
        cfg, points = config_of(arr)
        assert cfg.blocks == ((1, 2, 3),)
        assert points[(1, 2, 3)] == ProjPoint.of(0, 0, 1)

    def test_triangle(self, triangle):
        cfg, _ = config_of(triangle)
        assert cfg.blocks == ()
        assert type_of_arrangement(triangle) == CurveType(3, (2, 2, 2))

    def test_coincident_lines_rejected(self):
        with pytest.raises(CoincidentLinesError):
            LineArrangement((ProjLine.of(1, 2, 3), ProjLine.of(2, 4, 6)))

    def test_json_round_trip(self, realized):
        arr = realized(FamilyTag.D3_NODAL, 12)
        assert LineArrangement.from_json(arr.to_json()) == arr

    def test_bad_json(self):
        with pytest.raises(ConfigParseError):
            LineArrangement.from_json('{"d": 2, "lines": [["1","0","0"]]}')

    @pytest.mark.parametrize("seed", range(50))
    def test_node_count_matches_geometry(self, seed):
        d = 3 + seed % 6
        arr = random_arrangement(d, seed)
        assert node_count(type_of_arrangement(arr)) == arr.geometric_node_count()


class TestRealize:
    @pytest.mark.parametrize("family", THEOREM_FAMILIES, ids=lambda f: f.value)
    def test_theorem_families_at_12(self, family, realized):
        arr = realized(family, 12)
        cfg, _ = config_of(arr)
        assert cfg == family.expected_config(12)
        assert type_of(cfg) == family.curve_type(12)
        assert identify_family(cfg) == family

    @pytest.mark.slow
    @pytest.mark.parametrize("family", THEOREM_FAMILIES, ids=lambda f: f.value)
    def test_ten_seeds(self, family):
        for seed in range(1, 11):
            assert type_of_arrangement(realize(family, 12, seed)) == family.curve_type(12)

    def test_degree9_special(self, realized):
        arr = realized(FamilyTag.D3_TRIPLE_SHARED, 9)
        assert config_of(arr)[0] == parse_config("(9; {1,2,3,4,5,6}, {1,7,8})")

    def test_deterministic(self):
        assert realize(FamilyTag.D2_NODAL, 8, 5) == realize(FamilyTag.D2_NODAL, 8, 5)

    def test_family_notation(self):
        assert parse_family("(d;d-2,3,2^{2(d-3)})") == FamilyTag.D2_TRIPLE
        assert parse_family("pencil") == FamilyTag.PENCIL
        assert parse_family("degree9-special") == FamilyTag.D3_TRIPLE_SHARED
        with pytest.raises(ConfigParseError):
            parse_family("(d;d-5)")

    def test_family_types(self):
        assert FamilyTag.D2_TRIPLE.curve_type(12).render() == "(12; 10, 3, 2^18)"
        assert FamilyTag.D3_NODAL.curve_type(12).render() == "(12; 9, 2^30)"
        assert FamilyTag.D2_TRIPLE.type_at(2) is None

    @pytest.mark.parametrize(
        "text",
        ["(6; {1,2,3}, {1,4,5})", "(6; {1,2,4}, {1,3,5}, {2,3,6})", "(9; {1,2,3,4,5,6}, {1,7,8})", "(5;)"],
    )
    def test_realize_config(self, text):
        cfg = parse_config(text)
        assert config_of(realize_config(cfg, 3))[0] == cfg

    def test_config_needing_a_fourth_collinearity(self):
        # the three points on line 7 are fixed before it is placed
        with pytest.raises(RealizationError):
            realize_config(parse_config("(7; {1,2,7}, {3,4,7}, {5,6,7})"), 1)
