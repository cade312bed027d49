import glob
import json
import os

import pytest
from unittest.mock import patch

from orchestrator import SuiteOrchestrator
from checks.built_in_checks import RelationsCheck
from qgroup.errors import SolveError

SUITES_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "suites")
TEST_SUITES_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "test_suites")

# --- Fixtures ---

@pytest.fixture
def gated_suite_config():
    with open(os.path.join(TEST_SUITES_DIR, "gated_relations.json"), "r") as f:
        return json.load(f)

@pytest.fixture
def passing_relations():
    outputs = {"passed": True, "max_residual": 0, "failed": [], "report": {"dims": {"A1:[1]": 2}}}
    with patch.object(RelationsCheck, "execute", return_value=outputs) as mock_execute:
        yield mock_execute

# --- SuiteOrchestrator Tests ---

def test_orchestrator_initialization(gated_suite_config):
    orchestrator = SuiteOrchestrator(config=gated_suite_config)
    assert orchestrator.start_check_id == "relations"
    assert set(orchestrator.checks) == {"relations", "gate", "summary"}
    assert orchestrator.context["precision_bits"] == 200

def test_orchestrator_missing_fields():
    with pytest.raises(ValueError, match="start_check, checks"):
        SuiteOrchestrator({"suite_name": "Broken"})

def test_context_overrides_skip_none(gated_suite_config):
    orchestrator = SuiteOrchestrator(gated_suite_config, context_overrides={"q": "1/3", "tol": None, "seed": 5})
    assert orchestrator.context["q"] == "1/3"
    assert orchestrator.context["tol"] == 1e-40
    assert orchestrator.context["seed"] == 5

def test_run_passes_context_and_routes_through_gate(gated_suite_config, passing_relations):
    orchestrator = SuiteOrchestrator(gated_suite_config)
    with patch("builtins.print"):
        state = orchestrator.run()

    passing_relations.assert_called_once()
    kwargs = passing_relations.call_args.kwargs
    assert kwargs["inputs"] == {"q": "1/2", "precision_bits": 200, "tol": 1e-40}
    assert kwargs["config"]["algebras"] == ["A1"]
    assert kwargs["check_id"] == "relations"
    assert state["gate.verdict"] is True
    assert "gate._next_step_id" not in state
    assert state["summary.passed"] is True
    assert orchestrator.verdict(state)
    assert orchestrator.get_final_outputs(state) == {"passed": True, "dims": {"dims": {"A1:[1]": 2}}}

def test_progress_goes_to_stderr(gated_suite_config, passing_relations, capsys):
    SuiteOrchestrator(gated_suite_config).run()
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "Starting suite 'GatedRelationsTestSuite'" in captured.err
    assert "Suite finished." in captured.err

def test_quiet_run_prints_nothing(gated_suite_config, passing_relations, capsys):
    SuiteOrchestrator(gated_suite_config, quiet=True).run()
    assert capsys.readouterr() == ("", "")

def test_failed_gate_ends_the_suite(gated_suite_config):
    with patch.object(RelationsCheck, "execute", return_value={"passed": False, "failed": ["A1:[1]"]}):
        orchestrator = SuiteOrchestrator(gated_suite_config)
        with patch("builtins.print"):
            state = orchestrator.run()
    assert state["gate.verdict"] is False
    assert "summary.passed" not in state
    assert not orchestrator.verdict(state)
    outputs = orchestrator.get_final_outputs(state)
    assert outputs["passed"] == "Error: Output 'summary.passed' not found in final state"

def test_engine_errors_become_failed_checks(gated_suite_config):
    with patch.object(RelationsCheck, "execute", side_effect=SolveError("inconsistent grade", grade=(1,))):
        orchestrator = SuiteOrchestrator(gated_suite_config)
        with patch("builtins.print"):
            state = orchestrator.run()
    assert state["relations.passed"] is False
    assert state["relations.error"] == "SolveError: inconsistent grade"

def test_unresolved_input_raises(gated_suite_config):
    gated_suite_config["checks"][1]["inputs"] = {"passed": "relations.missing"}
    orchestrator = SuiteOrchestrator(gated_suite_config)
    with patch.object(RelationsCheck, "execute", return_value={"passed": True}), patch("builtins.print"):
        with pytest.raises(ValueError, match="relations.missing"):
            orchestrator.run()

def test_unknown_check_type(gated_suite_config):
    gated_suite_config["checks"][0]["type"] = "NoSuchCheck"
    with patch("builtins.print"), pytest.raises(ValueError, match="Unknown check 'NoSuchCheck'"):
        SuiteOrchestrator(gated_suite_config).run()

def test_routing_loop_is_rejected():
    with open(os.path.join(TEST_SUITES_DIR, "looping_suite.json"), "r") as f:
        config = json.load(f)
    with patch("builtins.print"), pytest.raises(ValueError, match="revisits check 'first'"):
        SuiteOrchestrator(config).run()

@pytest.mark.parametrize("path", sorted(glob.glob(os.path.join(SUITES_DIR, "*.json"))))
def test_shipped_suites_are_well_formed(path):
    with open(path, "r") as f:
        config = json.load(f)
    orchestrator = SuiteOrchestrator(config)
    for check_id, check in orchestrator.checks.items():
        assert check["type"] in orchestrator.check_registry
        target = orchestrator.routing.get(check_id, {}).get("next")
        assert target is None or target in orchestrator.checks
        for step in ("then_execute_step", "else_execute_step"):
            target = check.get("check_config", {}).get(step)
            assert target is None or target in orchestrator.checks
    for source in orchestrator.final_outputs_map.values():
        assert source.split(".")[0] in orchestrator.checks
