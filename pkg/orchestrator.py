import logging
import sys
from typing import Any, Dict, Optional

from checks.built_in_checks import (
    AlgebraSpanCheck,
    BraidCheck,
    DiagramCheck,
    F4Check,
    FlagCheck,
    KMatrixCheck,
    RelationsCheck,
    ResidualGateCheck,
    RMatrixCheck,
    SphericalCheck,
    VerdictAggregatorCheck,
)
from qgroup.errors import QGroupError

logger = logging.getLogger(__name__)


class SuiteOrchestrator:
    """
    Runs a verification suite defined in a JSON document.
    It handles the shared state, check routing and execution of the registered checks.
    """

    def __init__(self, config: Dict[str, Any], context_overrides: Optional[Dict[str, Any]] = None,
                 quiet: bool = False):
        """
        Initializes the orchestrator with a suite configuration.

        Args:
            config (dict): The parsed JSON suite.
            context_overrides (dict, optional): q, precision_bits or tol given on the command line.
            quiet (bool): Suppresses the progress lines, which go to stderr.
        """
        missing = [key for key in ("suite_name", "start_check", "checks") if key not in config]
        if missing:
            raise ValueError(f"Suite is incomplete. Missing fields: {', '.join(missing)}.")
        self.config = config
        self.checks = {check["id"]: check for check in config["checks"]}
        self.routing = config.get("routing", {})
        self.start_check_id = config["start_check"]
        self.final_outputs_map = config.get("final_outputs", {})
        self.quiet = quiet
        self.context = dict(config.get("context", {}))
        for key, value in (context_overrides or {}).items():
            if value is not None:
                self.context[key] = value

        # Maps check type names from the suite JSON to check instances.
        self.check_registry = {
            "RelationsCheck": RelationsCheck(),
            "RMatrixCheck": RMatrixCheck(),
            "BraidCheck": BraidCheck(),
            "DiagramCheck": DiagramCheck(),
            "KMatrixCheck": KMatrixCheck(),
            "FlagCheck": FlagCheck(),
            "SphericalCheck": SphericalCheck(),
            "AlgebraSpanCheck": AlgebraSpanCheck(),
            "F4Check": F4Check(),
            "ResidualGateCheck": ResidualGateCheck(),
            "VerdictAggregatorCheck": VerdictAggregatorCheck(),
        }

    def _resolve_inputs(self, inputs_config: Dict[str, Any], state: Dict[str, Any]) -> Dict[str, Any]:
        """
        Resolves a check's inputs from the suite state. Non-string values are literals;
        strings are state keys such as "suite.context.q" or "relations.passed".
        """
        resolved = {}
        for local_name, source in inputs_config.items():
            if not isinstance(source, str):
                resolved[local_name] = source
                continue
            if source not in state:
                raise ValueError(f"Input '{local_name}' (from '{source}') not found in suite state.")
            resolved[local_name] = state[source]
        return resolved

    def _execute(self, check_id: str, state: Dict[str, Any]) -> Dict[str, Any]:
        check_config = self.checks.get(check_id)
        if check_config is None:
            raise ValueError(f"Check '{check_id}' is routed to but not defined in the suite.")
        check_type = check_config["type"]
        if check_type not in self.check_registry:
            raise ValueError(f"Unknown check '{check_type}'. Available checks: {list(self.check_registry.keys())}")
        inputs = self._resolve_inputs(check_config.get("inputs", {}), state)
        try:
            return self.check_registry[check_type].execute(
                inputs=inputs,
                config=check_config.get("check_config", {}),
                check_id=check_id,
                suite_state=state,
            )
        except QGroupError as e:
            logger.error("Check %s raised %s: %s", check_id, type(e).__name__, e)
            return {"passed": False, "error": f"{type(e).__name__}: {e}"}

    def _progress(self, message: str) -> None:
        if not self.quiet:
            print(message, file=sys.stderr)

    def run(self) -> Dict[str, Any]:
        """
        Executes the suite from the start check to the end.

        Returns:
            The complete, final suite state dictionary.
        """
        state: Dict[str, Any] = {f"suite.context.{k}": v for k, v in self.context.items()}
        current_check_id = self.start_check_id
        visited = set()

        self._progress(f"🚀 Starting suite '{self.config['suite_name']}'...")

        while current_check_id:
            if current_check_id in visited:
                raise ValueError(f"Routing revisits check '{current_check_id}'.")
            visited.add(current_check_id)
            self._progress(f"\n▶️  Executing check: {current_check_id}")
            outputs = self._execute(current_check_id, state)

            verdict = outputs.get("passed", outputs.get("verdict"))
            marker = "✅" if verdict is not False else "❌"
            self._progress(f"{marker} Check '{current_check_id}' produced outputs: {list(outputs.keys())}")
            for key, value in outputs.items():
                if key != "_next_step_id":
                    state[f"{current_check_id}.{key}"] = value

            # A router may override the static routing.
            if "_next_step_id" in outputs:
                current_check_id = outputs["_next_step_id"]
            else:
                current_check_id = self.routing.get(current_check_id, {}).get("next")

        self._progress("\n🏁 Suite finished.")
        return state

    def verdict(self, final_state: Dict[str, Any]) -> bool:
        """True iff every executed check that reports 'passed' passed."""
        return all(value for key, value in final_state.items() if key.endswith(".passed"))

    def get_final_outputs(self, final_state: Dict[str, Any]) -> Dict[str, Any]:
        """
        Extracts the final outputs declared in the suite.

        Args:
            final_state (dict): The complete state dictionary after a suite run.

        Returns:
            A dictionary containing only the declared final outputs.
        """
        results = {}
        for key, source_path in self.final_outputs_map.items():
            value = final_state.get(source_path)
            results[key] = f"Error: Output '{source_path}' not found in final state" if value is None else value
        return results
