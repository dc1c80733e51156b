import pytest

from src.models.errors import NoRecipeError, WitnessError
from src.services.classifier.certificate import TERMINAL, verify_certificate
from src.services.classifier.recipes import DEGREE9_RECIPE, contract, find_recipe, has_recipe
from src.services.classifier.search import SearchBudget, search_contraction
from src.services.classifier.structure import structure_check
from src.services.classifier.theorem import (
    KODAIRA_NEGATIVE,
    classify,
    jung_is_minimal,
    marletta_index,
    quadratic_degree_drop,
    theorem_family_of_type,
)
from src.services.classifier.witnesses import noncontract_witness
from src.services.configuration.curve_type import analyze, parse_type
from src.services.configuration.families import FamilyTag
from src.services.linear_systems.adjoints import adjoint_dim, adjoint_spec, kodaira_bounded


def _replay(certificate):
    check = certificate.verify()
    assert check.ok, check.reason
    assert check.steps_checked == len(certificate.steps)
    assert check.degree_formula == tuple(step.image.degree_formula_ok for step in certificate.steps)
    assert all(check.degree_formula)
    assert all(step.degree_formula_ok for step in certificate.to_doc().steps)
    return check


class TestContraction:
    def test_triangle(self, triangle):
        certificate = contract(triangle, seed=1)
        _replay(certificate)
        assert certificate.steps[-1].expected_type == TERMINAL
        assert len(certificate.terminal) >= 1

    @pytest.mark.parametrize("family", [FamilyTag.PENCIL, FamilyTag.NEAR_PENCIL, FamilyTag.D2_TRIPLE, FamilyTag.D2_NODAL])
    def test_descent_families_small(self, family, realized):
        arr = realized(family, 6)
        assert find_recipe(arr) == family.value
        _replay(contract(arr, seed=1))

    @pytest.mark.slow
    @pytest.mark.parametrize("family", [FamilyTag.PENCIL, FamilyTag.NEAR_PENCIL, FamilyTag.D2_TRIPLE, FamilyTag.D2_NODAL])
    def test_descent_families_at_12(self, family, realized):
        certificate = contract(realized(family, 12), seed=3)
        _replay(certificate)

    def test_deterministic(self, realized):
        arr = realized(FamilyTag.D2_NODAL, 6)
        assert contract(arr, seed=5).to_json() == contract(arr, seed=5).to_json()

    def test_seed_zero_is_kept(self, triangle):
        certificate = contract(triangle, seed=0)
        assert certificate.seed == 0
        assert certificate.to_doc().seed == 0
        assert search_contraction(triangle, SearchBudget(2, 4), seed=0).certificate.seed == 0

    def test_no_recipe_for_the_nodal_d3_family(self, realized):
        arr = realized(FamilyTag.D3_NODAL, 7)
        assert not has_recipe(arr)
        with pytest.raises(NoRecipeError):
            contract(arr)

    def test_mutated_terminal_points_fail(self, triangle):
        doc = contract(triangle, seed=1).to_doc()
        mutated = doc.model_copy(update={"terminal": list(reversed(doc.terminal))})
        check = verify_certificate(mutated)
        assert not check.ok

    def test_mutated_source_fails(self, realized):
        doc = contract(realized(FamilyTag.NEAR_PENCIL, 5), seed=1).to_doc()
        source = doc.source.model_copy(update={"lines": [doc.source.lines[1], doc.source.lines[0]] + doc.source.lines[2:]})
        check = verify_certificate(doc.model_copy(update={"source": source}))
        assert not check.ok
        assert check.failed_step == 1

    def test_moved_base_point_fails(self, triangle):
        doc = contract(triangle, seed=1).to_doc()
        step = doc.steps[0]
        moved = step.map.base_points[0].model_copy(update={"point": ["7", "-3", "2"]})
        cmap = step.map.model_copy(update={"base_points": [moved] + step.map.base_points[1:]})
        steps = [step.model_copy(update={"map": cmap})] + doc.steps[1:]
        check = verify_certificate(doc.model_copy(update={"steps": steps}))
        assert not check.ok
        assert check.failed_step == 1

    @pytest.mark.slow
    def test_degree9_special_configuration(self, realized):
        arr = realized(FamilyTag.D3_TRIPLE_SHARED, 9)
        assert find_recipe(arr) == DEGREE9_RECIPE
        certificate = contract(arr, seed=1)
        _replay(certificate)
        assert certificate.maps[-1].degree == 4


class TestWitness:
    def test_d3_nodal(self, realized):
        arr = realized(FamilyTag.D3_NODAL, 12)
        witness = noncontract_witness(arr, seed=1, confirm=False)
        assert witness.member.degree == 15
        assert witness.general_count() == 3
        assert adjoint_spec(arr, 2, 3).is_satisfied_by(witness.member)
        assert adjoint_spec(arr, 3, 3).is_satisfied_by(witness.plurigenus_member)
        assert witness.family == FamilyTag.D3_NODAL
        # fixed lines through P0 times a binary cubic in the pencil at P0
        assert adjoint_dim(arr, 2, 3) == 3

    def test_quadruple_point_forces_its_line(self, realized):
        arr = realized(FamilyTag.D3_QUADRUPLE, 12)
        witness = noncontract_witness(arr, seed=1, confirm=False)
        # the component through P0 and the 4-fold point
        assert witness.multiplicity_of(arr.lines[3]) == 5
        assert witness.general_count() == 2

    def test_triple_point_off_the_pencil(self, realized):
        arr = realized(FamilyTag.D3_TRIPLE_DISJOINT, 12)
        witness = noncontract_witness(arr, seed=1, confirm=False)
        assert witness.general_count() == 3
        assert witness.to_doc().n == 2

    def test_degree9_dichotomy(self, realized):
        # same type as the contractible degree-9 configuration, triple point off the pencil
        arr = realized(FamilyTag.D3_TRIPLE_DISJOINT, 9)
        witness = noncontract_witness(arr, seed=1, confirm=False)
        assert witness.general_count() == 0
        assert witness.to_doc().plurigenus is None
        assert adjoint_dim(arr, 2, 3) >= 0

    def test_requires_a_d_minus_3_point(self, realized):
        with pytest.raises(WitnessError):
            noncontract_witness(realized(FamilyTag.D2_NODAL, 8), confirm=False)

    @pytest.mark.slow
    def test_rank_confirmation(self, realized):
        witness = noncontract_witness(realized(FamilyTag.D3_NODAL, 12), seed=1)
        assert witness.plurigenus is not None and witness.plurigenus > 0
        assert witness.to_doc().plurigenus == witness.plurigenus


class TestStructure:
    def test_d3_nodal_cases(self, realized):
        report = structure_check(realized(FamilyTag.D3_NODAL, 12))
        assert report.applicable
        assert report.excess == 1
        assert report.cases["alpha'"]
        assert report.cases["beta'"]
        assert report.holds

    def test_pencil_is_not_applicable(self, realized):
        report = structure_check(realized(FamilyTag.PENCIL, 6))
        assert not report.applicable

    def test_excess_three_has_only_the_triangle_case(self, realized):
        # 10 + 3 + 2 = d + 3
        report = structure_check(realized(FamilyTag.D2_TRIPLE, 12))
        assert report.excess == 3
        assert list(report.cases) == ["triangle"]

    def test_foreign_invariants_are_reported(self, realized):
        # m = 13 asks for P1, P2 with m1 + m2 = 3 next to a 10-fold point
        report = structure_check(realized(FamilyTag.D2_NODAL, 12), analyze(parse_type("(12; 9, 2^30)")))
        assert report.applicable
        assert not report.holds
        assert report.failed == ("multiplicities of P1, P2",)


class TestSearch:
    def test_triangle_in_one_step(self, triangle):
        outcome = search_contraction(triangle, SearchBudget(2, 4), seed=1)
        assert outcome.found
        assert outcome.depth_reached == 1
        _replay(outcome.certificate)

    def test_pencil_of_four(self, realized):
        outcome = search_contraction(realized(FamilyTag.PENCIL, 4), SearchBudget(4, 6), seed=1)
        assert outcome.found
        assert outcome.to_dict()["status"] == "certificate"
        _replay(outcome.certificate)

    def test_budget_is_respected(self, realized):
        outcome = search_contraction(realized(FamilyTag.D3_NODAL, 7), SearchBudget(1, 2), seed=1)
        assert not outcome.found
        assert outcome.depth_reached <= 1
        assert outcome.to_dict()["status"] == "exhausted"


class TestNumerics:
    def test_jung(self):
        assert not jung_is_minimal(parse_type("(12; 9, 2^30)"))
        assert jung_is_minimal(parse_type("(7; 2^21)"))

    def test_marletta_index(self):
        assert marletta_index(parse_type("(12; 9, 2^30)")) == 1
        assert marletta_index(parse_type("(12; 8, 2^38)")) == 2
        assert marletta_index(parse_type("(10; 4, 2^39)")) == 3

    def test_quadratic_degree_drop(self):
        assert quadratic_degree_drop(12, 10, 3, 2) == 9

    def test_theorem_family_of_type(self):
        assert theorem_family_of_type(parse_type("(12; 10, 3, 2^18)")) == FamilyTag.D2_TRIPLE
        assert theorem_family_of_type(parse_type("(12; 8, 2^38)")) is None


class TestClassify:
    def test_pencil(self, realized):
        result = classify(realized(FamilyTag.PENCIL, 4), seed=1)
        assert result.vanishing_adjoints
        assert result.contractible == "yes"
        assert result.kodaira == KODAIRA_NEGATIVE
        assert result.certificate is not None
        doc = result.to_doc()
        assert doc.adjoint_dims == [-1, -1]
        assert doc.structure is None
        assert doc.diagnostics["quadratic_image_degree"] == 2
        assert doc.diagnostics["numerical_conditions"] == {}
        assert not doc.diagnostics["jung_minimal"]

    def test_control_family(self, realized):
        result = classify(realized(FamilyTag.CONTROL, 12), seed=1)
        assert not result.vanishing_adjoints
        assert result.contractible == "no"
        assert result.kodaira_witness_m is not None
        assert result.witness is not None
        assert result.vanishing_evidence == "rank and type table agree"

    @pytest.mark.slow
    def test_d3_nodal(self, realized):
        result = classify(realized(FamilyTag.D3_NODAL, 12), seed=1)
        assert result.vanishing_adjoints
        assert result.contractible == "no"
        assert result.kodaira == "at_least_zero(m=3)"
        assert result.family == FamilyTag.D3_NODAL
        assert result.witness.plurigenus > 0

    @pytest.mark.slow
    def test_d2_triple(self, realized):
        result = classify(realized(FamilyTag.D2_TRIPLE, 12), seed=1)
        assert result.contractible == "yes"
        assert result.certificate.verify().ok


D2_GROUP = [FamilyTag.PENCIL, FamilyTag.NEAR_PENCIL, FamilyTag.D2_TRIPLE, FamilyTag.D2_NODAL]


@pytest.mark.slow
@pytest.mark.parametrize("family", D2_GROUP, ids=lambda f: f.value)
def test_d2_group_plurigenera_vanish(family, realized):
    verdict = kodaira_bounded(realized(family, 12), 12)
    assert verdict.negative
    assert all(r.value == 0 for r in verdict.reports)


@pytest.mark.slow
@pytest.mark.parametrize("family", D2_GROUP, ids=lambda f: f.value)
def test_search_agrees_with_recipes(family, realized):
    arr = realized(family, 5)
    assert has_recipe(arr)
    outcome = search_contraction(arr, SearchBudget(6, 12), seed=1)
    assert outcome.found
    _replay(outcome.certificate)
