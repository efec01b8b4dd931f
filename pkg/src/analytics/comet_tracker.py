import logging
from typing import Any, Dict, List

from config.settings import COMET_API_KEY, COMET_PROJECT_NAME, COMET_WORKSPACE

logger = logging.getLogger(__name__)


def _flatten(prefix: str, values: Dict[str, Any]) -> Dict[str, Any]:
    flat = {}
    for key, value in values.items():
        name = f"{prefix}.{key}" if prefix else key
        if isinstance(value, dict):
            flat.update(_flatten(name, value))
        else:
            flat[name] = value
    return flat


class CometTracker:
    def __init__(self, experiment_name: str = None):
        self.experiment = None
        self.disabled = False

        if not COMET_API_KEY:
            logger.info("Comet API key not found. Tracking disabled.")
            self.disabled = True
            return

        if not COMET_WORKSPACE:
            logger.warning("Comet workspace not configured. Tracking disabled.")
            self.disabled = True
            return

        try:
            from comet_ml import Experiment
            self.experiment = Experiment(
                api_key=COMET_API_KEY,
                project_name=COMET_PROJECT_NAME,
                workspace=COMET_WORKSPACE,
                auto_output_logging="simple"
            )
            if experiment_name:
                self.experiment.set_name(experiment_name)
            logger.info("Comet ML initialized successfully.")
        except ImportError:
            logger.warning("comet_ml not installed. Tracking disabled.")
            self.disabled = True
        except Exception as e:
            logger.error(f"Failed to initialize Comet: {e}")
            self.disabled = True

    def log_scenario(self, resolved_config: Dict[str, Any], report: Dict[str, Any]):
        """Config keys as parameters, BER/EVM/cost as metrics."""
        if self.disabled or not self.experiment:
            return

        try:
            self.experiment.log_parameters(_flatten("", resolved_config))
            ber = report.get("ber", {})
            self.experiment.log_metric("ber", ber.get("ber"))
            self.experiment.log_metric("bit_errors", ber.get("bit_errors"))
            self.experiment.log_metric("evm_percent", report.get("evm_percent"))
            self.experiment.log_metric("cma_cost_final", report.get("cma_cost_final"))
            self.experiment.log_metric("pol_extinction_db", report.get("pol_extinction_db"))
        except Exception:
            pass

    def log_cost_trace(self, cost_trace: List[float]):
        if self.disabled or not self.experiment:
            return

        try:
            for step, value in enumerate(cost_trace):
                self.experiment.log_metric("cma_cost", value, step=step)
        except Exception:
            pass

    def log_suite_metrics(self, rows: List[Dict[str, Any]]):
        if self.disabled or not self.experiment:
            return

        try:
            bers = [r["ber"] for r in rows if r.get("status") == "ok"]
            if bers:
                self.experiment.log_metric("suite_scenarios", len(rows))
                self.experiment.log_metric("suite_min_ber", min(bers))
                self.experiment.log_metric("suite_max_ber", max(bers))
        except Exception:
            pass

    def end(self):
        if self.disabled or not self.experiment:
            return

        try:
            self.experiment.end()
        except Exception:
            pass
