import io
import json
import os

import pytest
from unittest.mock import MagicMock, patch

from main import BLUE, GREEN, RED, RESET, YELLOW, display_suite_flow, resolve_suite, run
from qgroup.errors import SolveError

TEST_SUITE = os.path.join(os.path.dirname(os.path.abspath(__file__)), "test_suites", "gated_relations.json")
FAST = ["--prec", "200", "--tol", "1e-40"]


def _run_json(argv, capsys):
    code = run(argv)
    return code, json.loads(capsys.readouterr().out)


# --- Exit codes ---

def test_cartan_info(capsys):
    code, doc = _run_json(["cartan", "info", "G2"], capsys)
    assert code == 0
    assert doc["positive_roots"] == 6
    assert len(doc["longest_word"]) == 6
    assert doc["schema"] == 1 and doc["command"] == "cartan" and doc["passed"] is True

@pytest.mark.parametrize("argv", [
    ["cartan", "info", "H3"],
    ["--q", "1", "cartan", "info", "A1"],
    ["--q", "-2", "cartan", "info", "A1"],
    ["--prec", "64", "cartan", "info", "A1"],
    ["repn", "build", "--algebra", "A2", "--weight", "1,0,0"],
    ["diagrams", "extend", "g=A2; X=1; tau=id"],
    ["verify", "no_such_suite"],
    [],
    ["kmatrix"],
])
def test_malformed_input_exits_with_usage_error(argv, capsys):
    assert run(argv) == 2

def test_help_exits_cleanly(capsys):
    assert run(["--help"]) == 0
    assert "verify" in capsys.readouterr().out

@patch("main.RMatrixCheck")
def test_engine_error_is_a_failed_result(mock_check_class, capsys):
    mock_check_class.return_value.execute.side_effect = SolveError("grade (1,) is inconsistent")
    code = run(FAST + ["rmat", "check", "--algebra", "A1"])
    captured = capsys.readouterr()
    assert code == 1
    assert "SolveError: grade (1,) is inconsistent" in captured.err
    assert json.loads(captured.out)["error"] == "SolveError: grade (1,) is inconsistent"


# --- Module documents ---

def test_repn_build_and_check_round_trip(tmp_path, capsys):
    path = str(tmp_path / "v.json")
    assert run(FAST + ["--out", path, "repn", "build", "--algebra", "A2", "--weight", "1,0"]) == 0
    with open(path, "r") as f:
        doc = json.load(f)
    assert doc["dim"] == 3 and doc["weyl_dim"] == 3 and doc["passed"] is True
    capsys.readouterr()
    code, checked = _run_json(FAST + ["repn", "check", path], capsys)
    assert code == 0
    assert checked["dim"] == 3

def test_repn_decompose(capsys):
    code, doc = _run_json(FAST + ["repn", "decompose", "--algebra", "A1", "--weights", "1", "1"], capsys)
    assert code == 0
    assert sorted(doc["components"]) == [[0], [2]]

def test_repn_check_missing_file(tmp_path, capsys):
    assert run(["repn", "check", str(tmp_path / "absent.json")]) == 2
    captured = capsys.readouterr()
    assert "file not found" in captured.err
    assert captured.out == ""

def test_repn_check_invalid_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("not json")
    assert run(["repn", "check", str(bad)]) == 2


# --- Diagrams ---

def test_diagrams_extend_fii(capsys):
    code, doc = _run_json(["diagrams", "extend", "g=F4; X=2,3,4; tau=id"], capsys)
    assert code == 0
    assert doc["sign"] == "eta{1}"
    assert all(doc["report"].values())

def test_diagrams_classes_d4(capsys):
    code, doc = _run_json(["diagrams", "classes", "D4"], capsys)
    assert code == 0
    assert len(doc["classes"]) == 11
    assert len(doc["non_invariant"]) == 9


# --- K-matrices ---

def test_kmatrix_build_emits_matrices_and_report(tmp_path, capsys):
    path = str(tmp_path / "k.json")
    code = run(FAST + ["--out", path, "kmatrix", "build", "--diagram", "g=A1; X=; tau=id", "--module", "1"])
    assert code in (0, 1)
    with open(path, "r") as f:
        doc = json.load(f)
    assert doc["command"] == "kmatrix" and doc["action"] == "build"
    assert doc["module"]["dim"] == 2
    assert set(doc["matrices"]) == {"quasi", "raw", "modified"}
    assert all(len(entry) == 3 for entry in doc["matrices"]["modified"])
    assert doc["matrices"]["modified"]
    assert float(doc["report"]["max"]) < 1e-30

def test_kmatrix_build_requires_a_module(capsys):
    assert run(["kmatrix", "build", "--diagram", "g=A1; X=; tau=id"]) == 2

def test_global_options_after_the_subcommand(capsys):
    code, doc = _run_json(["cartan", "info", "A2", "--q", "1/3", "--prec", "200", "--tol", "1e-40"], capsys)
    assert code == 0
    assert doc["context"]["q"] == "1/3"
    assert doc["context"]["precision_bits"] == 200

def test_bad_context_after_the_subcommand(capsys):
    assert run(["cartan", "info", "A1", "--q", "1"]) == 2



# --- verify ---

def test_resolve_suite():
    assert resolve_suite("other/suite.json") == "other/suite.json"
    assert resolve_suite("f4").endswith(os.path.join("suites", "f4.json"))

def test_verify_runs_a_suite_file(capsys):
    code = run(FAST + ["verify", TEST_SUITE, "--quiet"])
    captured = capsys.readouterr()
    assert code == 0
    doc = json.loads(captured.out)
    assert "Starting suite" not in captured.err
    assert doc["suite"] == "GatedRelationsTestSuite"
    assert doc["checks"]["relations"]["passed"] is True
    assert doc["context"]["precision_bits"] == 200

@patch("main.SuiteOrchestrator")
def test_verify_failed_suite_exits_one(mock_orchestrator_class, tmp_path):
    instance = MagicMock()
    instance.checks = {"relations": {}}
    instance.context = {"q": "1/2"}
    instance.run.return_value = {"relations.passed": False, "relations.failed": ["A1:[1]"]}
    instance.get_final_outputs.return_value = {"passed": False}
    instance.verdict.return_value = False
    mock_orchestrator_class.return_value = instance

    with patch("builtins.print"):
        code = run(["--seed", "3", "--out", str(tmp_path / "r.json"), "verify", TEST_SUITE])

    assert code == 1
    config, = mock_orchestrator_class.call_args.args
    assert config["suite_name"] == "GatedRelationsTestSuite"
    overrides = mock_orchestrator_class.call_args.kwargs["context_overrides"]
    assert overrides == {"q": None, "precision_bits": None, "tol": None, "seed": 3}
    instance.run.assert_called_once()
    with open(tmp_path / "r.json", "r") as f:
        doc = json.load(f)
    assert doc["checks"] == {"relations": {"passed": False, "failed": ["A1:[1]"]}}


# --- display_suite_flow ---

@patch("sys.stderr", new_callable=io.StringIO)
def test_display_suite_flow_with_gate(mock_stderr):
    with open(TEST_SUITE, "r") as f:
        display_suite_flow(json.load(f))
    output = mock_stderr.getvalue()
    assert f"{BLUE}--- Suite Flow ---{RESET}" in output
    assert f"{GREEN}1. Check: relations (Type: RelationsCheck){RESET}" in output
    assert f"Passed -> {YELLOW}summary{RESET}, Failed -> {YELLOW}END{RESET}" in output
    assert f"Next -> {RED}END{RESET}" in output

@patch("sys.stderr", new_callable=io.StringIO)
def test_display_suite_flow_invalid_config(mock_stderr):
    display_suite_flow({})
    assert "Invalid or incomplete suite configuration provided." in mock_stderr.getvalue()
