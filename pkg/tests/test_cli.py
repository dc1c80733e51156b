import json

import pytest

from app import EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, main
from src.controllers.cli_controller import parse_map_spec
from src.models.errors import DegenerateInputError, UsageError


def _run_json(capsys, argv):
    code = main(argv + ["--format", "json"])
    return code, json.loads(capsys.readouterr().out) if code == EXIT_OK else None


class TestMapSpecs:
    def test_quadratic(self):
        cmap = parse_map_spec("quadratic:1,0,0;0,1,0;0,0,1")
        assert cmap.degree == 2
        assert len(cmap.base_points) == 3

    def test_rationals_and_spaces(self):
        cmap = parse_map_spec("quadratic: 1/2,0,0 ; 0,1,0 ; 1,1,1")
        assert cmap.kind == "quadratic"

    def test_wrong_item_count(self):
        with pytest.raises(UsageError):
            parse_map_spec("quadratic:1,0,0;0,1,0")

    def test_unknown_kind(self):
        with pytest.raises(UsageError):
            parse_map_spec("cubic:1,0,0")

    def test_bad_point(self):
        with pytest.raises(UsageError):
            parse_map_spec("quadratic:1,0;0,1,0;0,0,1")

    def test_collinear_points_are_a_domain_error(self):
        with pytest.raises(DegenerateInputError):
            parse_map_spec("quadratic:1,0,0;0,1,0;1,1,0")

    def test_missing_map_file(self, tmp_path):
        with pytest.raises(UsageError):
            parse_map_spec(str(tmp_path / "nothing.json"))


class TestExitCodes:
    def test_no_command(self):
        assert main([]) == EXIT_USAGE

    def test_two_inputs(self):
        assert main(["classify", "--config", "(3;)", "--realize", "pencil", "--d", "3"]) == EXIT_USAGE

    def test_realize_without_degree(self):
        assert main(["realize", "--realize", "pencil"]) == EXIT_USAGE

    def test_missing_certificate(self, tmp_path):
        assert main(["verify", str(tmp_path / "missing.json")]) == EXIT_USAGE

    def test_malformed_configuration(self):
        assert main(["classify", "--config", "(5; {1,2})"]) == EXIT_DOMAIN

    def test_unrealizable_configuration(self):
        assert main(["realize", "--config", "(7; {1,2,7}, {3,4,7}, {5,6,7})"]) == EXIT_DOMAIN

    def test_degenerate_map(self):
        assert main(["transform", "--config", "(3;)", "--map", "quadratic:1,0,0;0,1,0;1,1,0"]) == EXIT_DOMAIN


class TestCommands:
    def test_classify_pencil(self, capsys):
        code, out = _run_json(capsys, ["classify", "--config", "(4; {1,2,3,4})"])
        assert code == EXIT_OK
        assert out["contractible"] == "yes"
        assert out["kodaira"] == "-inf"
        assert out["type"] == "(4; 4)"

    def test_adjoints(self, capsys):
        code, out = _run_json(capsys, ["adjoints", "--realize", "d2-triple", "--d", "12"])
        assert code == EXIT_OK
        assert out["systems"][0]["system"] == "(9; 9, 2, 1^18)"
        assert all(dim == -1 for dim in out["dims"])

    def test_plurigenera(self, capsys):
        code, out = _run_json(capsys, ["plurigenera", "--realize", "pencil", "--d", "5", "-M", "2"])
        assert code == EXIT_OK
        assert out["verdict"] == "negative_up_to(2)"
        assert [v["value"] for v in out["values"]] == [0, 0]
        assert out["agrees_with_theorem"] is None

    def test_plurigenera_against_the_type_table(self, capsys):
        code, out = _run_json(capsys, ["plurigenera", "--realize", "d2-triple", "--d", "12", "-M", "2"])
        assert code == EXIT_OK
        assert out["verdict"] == "negative_up_to(2)"
        assert out["agrees_with_theorem"] is True

    def test_transform(self, capsys):
        code, out = _run_json(
            capsys, ["transform", "--config", "(3;)", "--map", "quadratic:1,0,0;0,1,0;0,0,1"]
        )
        assert code == EXIT_OK
        assert out["source_type"] == "(3; 2^3)"
        assert out["image"]["image_degree"] == 6

    def test_realize_contract_verify(self, tmp_path, capsys):
        lines = tmp_path / "near_pencil.json"
        certificate = tmp_path / "certificate.json"
        assert main(["realize", "--realize", "near-pencil", "--d", "5", "--output", str(lines)]) == EXIT_OK
        assert json.loads(lines.read_text())["d"] == 5
        assert main(["contract", "--lines", str(lines), "--output", str(certificate)]) == EXIT_OK
        capsys.readouterr()
        code, out = _run_json(capsys, ["verify", str(certificate)])
        assert code == EXIT_OK
        assert out["ok"]
        assert out["degree_formula_ok"] and all(out["degree_formula_ok"])

    def test_tampered_certificate(self, tmp_path):
        certificate = tmp_path / "certificate.json"
        assert main(["contract", "--realize", "pencil", "--d", "4", "--output", str(certificate)]) == EXIT_OK
        doc = json.loads(certificate.read_text())
        doc["terminal"] = [["1", "2", "3"]]
        certificate.write_text(json.dumps(doc))
        assert main(["verify", str(certificate)]) == EXIT_DOMAIN

    def test_output_is_deterministic(self, capsys):
        argv = ["contract", "--realize", "d2-nodal", "--d", "6", "--seed", "7", "--format", "json"]
        assert main(argv) == EXIT_OK
        first = capsys.readouterr().out
        assert main(argv) == EXIT_OK
        assert capsys.readouterr().out == first

    def test_seed_zero_is_accepted(self, capsys):
        code, out = _run_json(capsys, ["contract", "--realize", "pencil", "--d", "4", "--seed", "0"])
        assert code == EXIT_OK
        assert out["seed"] == 0

    def test_text_report(self, capsys):
        assert main(["realize", "--realize", "pencil", "--d", "3"]) == EXIT_OK
        assert capsys.readouterr().out.strip()
