import pytest
from unittest.mock import patch
from mpmath import mpf

from checks.base_check import BaseCheck
from checks.built_in_checks import (
    DiagramCheck,
    FlagCheck,
    RelationsCheck,
    ResidualGateCheck,
    SphericalCheck,
    VerdictAggregatorCheck,
    _flag_sign,
    _random_pairs,
)

CONTEXT = {"q": "1/2", "precision_bits": 200, "tol": 1e-40}


# --- Tests for BaseCheck ---

def test_context_defaults():
    ctx = BaseCheck.context({})
    assert ctx.precision_bits == 300
    assert ctx.tol == 1e-60
    assert BaseCheck.context(CONTEXT).precision_bits == 200

def test_finish_collects_residuals_and_conditions():
    check = VerdictAggregatorCheck()
    outputs = check.finish({"note": 1}, {"small": mpf("1e-50"), "large": mpf("1e-10")},
                           {"threshold": 1e-40}, {"holds": True, "breaks": False})
    assert outputs["passed"] is False
    assert outputs["failed"] == ["large", "breaks"]
    assert outputs["max_residual"] == mpf("1e-10")
    assert outputs["report"] == {"note": 1}

def test_threshold_defaults_to_the_context_tol():
    check = VerdictAggregatorCheck()
    strict = BaseCheck.context({"tol": 1e-60})
    loose = BaseCheck.context({"tol": 1e-40})
    residuals = {"r": mpf("1e-50")}
    assert check.finish({}, residuals, {}, ctx=strict)["failed"] == ["r"]
    assert check.finish({}, residuals, {}, ctx=loose)["passed"] is True
    # a configured threshold never tightens the tol
    assert check.threshold({"threshold": 1e-70}, loose) == 1e-40
    assert check.threshold({"threshold": 1e-25}, strict) == 1e-25

@patch("checks.built_in_checks.check_relations", return_value={"max": mpf("1e-50")})
def test_relations_check_obeys_the_context_tol(mock_relations):
    assert RelationsCheck().execute({"tol": 1e-60}, {"algebras": ["A1"]})["passed"] is False
    assert RelationsCheck().execute({"tol": 1e-45}, {"algebras": ["A1"]})["passed"] is True

def test_finish_with_nothing_to_check():
    outputs = VerdictAggregatorCheck().finish({}, {}, {})
    assert outputs["passed"] is True
    assert outputs["max_residual"] == 0


# --- Tests for RelationsCheck ---

def test_relations_check_rank_one():
    outputs = RelationsCheck().execute(CONTEXT, {"algebras": ["A1", "B2"]})
    assert outputs["passed"]
    assert outputs["report"]["dims"] == {"A1:[1]": 2, "B2:[1,0]": 5, "B2:[0,1]": 4}

def test_relations_check_requires_algebras():
    with pytest.raises(ValueError, match="algebras"):
        RelationsCheck().execute(CONTEXT, {})

@patch("checks.built_in_checks.check_relations", return_value={"max": mpf("0.5")})
def test_relations_check_reports_large_residuals(mock_relations):
    outputs = RelationsCheck().execute(CONTEXT, {"algebras": ["A1"]})
    mock_relations.assert_called_once()
    assert outputs["passed"] is False
    assert outputs["failed"] == ["A1:[1]"]


# --- Tests for DiagramCheck and SphericalCheck ---

def test_diagram_check_on_d4():
    config = {"vogan_algebra": "D4", "expected_classes": 9, "inequivalent_pair": [[3], [4]], "max_rank": 2}
    outputs = DiagramCheck().execute({}, config)
    assert outputs["passed"], outputs["failed"]
    assert outputs["report"]["classes"] == 9
    assert outputs["report"]["dl_invariants"] == [-1, 1]

def test_diagram_check_wrong_expectation():
    outputs = DiagramCheck().execute({}, {"vogan_algebra": "D4", "expected_classes": 8, "max_rank": 1})
    assert "class_count" in outputs["failed"]

def test_spherical_check_scan():
    config = {"scan": [{"satake": "g=A1; X=; tau=id", "max_height": 3}]}
    outputs = SphericalCheck().execute(CONTEXT, config)
    assert outputs["passed"]
    rows = outputs["report"]["scan:g=A1; X=; tau=id"]
    assert [row["multiplicity"] for row in rows] == [1, 0, 1, 0]

@patch("checks.built_in_checks.flag_phihat_check", return_value=mpf("0.3449"))
def test_flag_check_gates_on_the_phihat_identity(mock_phihat):
    config = {"cases": [{"algebra": "A2", "S": [1], "module": ["1,0"], "weights": ["1,0"]}], "threshold": 1e-30}
    outputs = FlagCheck().execute(CONTEXT, config)
    mock_phihat.assert_called_once()
    assert outputs["passed"] is False
    assert outputs["failed"] == ["A2:S=1:phihat[1,0]"]


# --- Tests for the helpers ---

def test_random_pairs_are_seeded():
    first = _random_pairs(6, 7, 5)
    assert first == _random_pairs(6, 7, 5)
    assert len(first) == 5
    assert all(1 <= i <= 6 and 1 <= j <= 6 for i, j in first)
    assert _random_pairs(6, None, 3) == _random_pairs(6, 0, 3)

def test_flag_sign_from_support():
    assert _flag_sign(3, [1, 3]).values == (1, 0, 1)
    assert _flag_sign(2, "2").values == (0, 1)


# --- Tests for ResidualGateCheck ---

def test_gate_routes_on_passed():
    gate = ResidualGateCheck()
    config = {"then_execute_step": "summary", "else_execute_step": "report"}
    assert gate.execute({"passed": True}, config) == {"verdict": True, "_next_step_id": "summary"}
    assert gate.execute({"passed": False}, config) == {"verdict": False, "_next_step_id": "report"}

def test_gate_without_else_ends_the_suite():
    outputs = ResidualGateCheck().execute({"passed": False}, {"then_execute_step": "summary"})
    assert outputs["_next_step_id"] is None

def test_gate_requires_passed():
    with pytest.raises(ValueError):
        ResidualGateCheck().execute({}, {})


# --- Tests for VerdictAggregatorCheck ---

def test_aggregator_merges_verdicts():
    outputs = VerdictAggregatorCheck().execute({"relations": True, "braid": False}, {})
    assert outputs == {"passed": False, "verdicts": {"relations": True, "braid": False}}
    assert VerdictAggregatorCheck().execute({}, {})["passed"] is True
