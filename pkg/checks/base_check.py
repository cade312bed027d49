from abc import ABC, abstractmethod
from typing import Any, Dict, Iterable, Optional

from mpmath import mp

from qgroup.scalars import ScalarContext


class BaseCheck(ABC):
    """Abstract Base Class for all verification checks."""

    @abstractmethod
    def execute(self, inputs: dict, config: dict, check_id: Optional[str] = None, **kwargs) -> dict:
        """
        Runs the check.

        Args:
            inputs (dict): Resolved inputs; "q", "precision_bits" and "tol" build the ScalarContext.
            config (dict): The 'check_config' block from the suite JSON.
            check_id (str, optional): The ID of the step executing this check.
            **kwargs: Extra keyword arguments from the orchestrator, such as 'suite_state'.

        Returns:
            A dictionary of outputs. Residual checks always return 'passed',
            'max_residual' and 'report'.
        """

    @staticmethod
    def context(inputs: dict) -> ScalarContext:
        defaults = ScalarContext()
        ctx = ScalarContext(
            inputs.get("q", defaults.q),
            int(inputs.get("precision_bits", defaults.precision_bits)),
            float(inputs.get("tol", defaults.tol)),
        )
        return ctx.activate()

    def threshold(self, config: dict, ctx: Optional[ScalarContext] = None) -> float:
        """The context tol; a configured threshold may loosen it but never tighten it."""
        tol = (ctx or ScalarContext()).tol
        return max(tol, float(config.get("threshold", tol)))

    @staticmethod
    def worst(values: Iterable[Any]):
        return max((v for v in values), default=mp.zero)

    def finish(self, report: Dict[str, Any], residuals: Dict[str, Any], config: dict,
               conditions: Optional[Dict[str, bool]] = None, ctx: Optional[ScalarContext] = None) -> dict:
        """Outputs for a report: passed iff every residual is below the threshold and every condition holds."""
        limit = self.threshold(config, ctx)
        failed = [name for name, value in residuals.items() if value >= limit]
        failed += [name for name, ok in (conditions or {}).items() if not ok]
        return {"passed": not failed, "max_residual": self.worst(residuals.values()),
                "failed": failed, "report": report}
