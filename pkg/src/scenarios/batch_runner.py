import concurrent.futures
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import pandas as pd

from config.settings import OUTPUT_DIR, SUITE_MAX_JOBS
from src.analytics.comet_tracker import CometTracker
from src.scenarios.config_loader import ScenarioConfig, load_config
from src.scenarios.runner import run_scenario
from src.utils.errors import ConfigInvalidError, IoFailureError, ScenarioError

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = ["name", "source", "length_km", "eq", "ber", "bit_errors", "bits_compared", "evm_percent", "report_sha256", "status", "error"]
SUMMARY_FILE = "summary.csv"


@dataclass
class SuiteResult:
    """Summary rows for the scenarios that ran, plus the configs rejected before running."""

    summary: pd.DataFrame
    config_errors: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.config_errors and bool((self.summary["status"] == "ok").all())


def _row(cfg: ScenarioConfig, **values) -> Dict[str, Any]:
    row = {column: None for column in SUMMARY_COLUMNS}
    row.update(
        name=cfg.name,
        source=cfg.source,
        length_km=cfg.fiber.length_km,
        eq="on" if cfg.equalizer.enabled else "off",
    )
    row.update(values)
    return row


def run_suite(
    paths: Sequence[Union[str, Path]],
    max_workers: int = SUITE_MAX_JOBS,
    out_dir: Optional[Path] = None,
    seed: Optional[int] = None,
    no_eq: bool = False,
) -> SuiteResult:
    """
    Run several scenarios in parallel and collect one summary row per scenario.

    Configs that fail to load, or that reuse another config's scenario name, are
    logged at ERROR with their file and left out of the summary. The remaining
    scenarios still run.

    Args:
        paths (Sequence): Config files or preset names.
        max_workers (int): Maximum number of concurrent scenarios.
        out_dir (Path, optional): Output root; defaults to OUTPUT_DIR.
        seed (int, optional): Master seed override applied to every scenario.
        no_eq (bool): Force the equalizer off in every scenario.

    Returns:
        SuiteResult: Summary rows in input order with status "ok" or "scenario-error",
        and one message per rejected config naming its file. summary.csv is written even when
        some inputs failed.
    """
    if not paths:
        raise ValueError("run_suite needs at least one config")
    out_dir = Path(out_dir) if out_dir is not None else OUTPUT_DIR

    config_errors: List[str] = []
    configs: Dict[int, ScenarioConfig] = {}
    for i, path in enumerate(paths):
        try:
            configs[i] = load_config(path, seed=seed, no_eq=no_eq)
        except ConfigInvalidError as e:
            message = str(e) if e.source else f"{path}: {e}"
            logger.error(f"Invalid config {message}")
            config_errors.append(message)

    names = [cfg.name for cfg in configs.values()]
    duplicates = {name for name in names if names.count(name) > 1}
    for i, cfg in list(configs.items()):
        if cfg.name in duplicates:
            message = f"{cfg.source}: scenario name '{cfg.name}' is used by more than one config"
            logger.error(message)
            config_errors.append(message)
            del configs[i]

    rows: Dict[int, Dict[str, Any]] = {}
    with concurrent.futures.ThreadPoolExecutor(max_workers=max(1, max_workers)) as executor:
        # Map each future back to its input slot so rows keep the input order
        future_to_index = {
            executor.submit(run_scenario, cfg, out_dir): i for i, cfg in configs.items()
        }

        for future in concurrent.futures.as_completed(future_to_index):
            i = future_to_index[future]
            cfg = configs[i]
            try:
                report = future.result()
                rows[i] = _row(
                    cfg,
                    ber=report.ber.ber,
                    bit_errors=report.ber.bit_errors,
                    bits_compared=report.ber.bits_compared,
                    evm_percent=report.evm_percent,
                    report_sha256=report.report_sha256,
                    status="ok",
                )
            except ScenarioError as e:
                logger.error(f"Error running {cfg.name}: {e}")
                rows[i] = _row(cfg, status="scenario-error", error=str(e))

    summary = pd.DataFrame([rows[i] for i in sorted(rows)], columns=SUMMARY_COLUMNS)
    path = out_dir / SUMMARY_FILE
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        summary.to_csv(path, index=False, float_format="%.6g", lineterminator="\n")
    except OSError as e:
        raise IoFailureError(f"Failed to write suite summary to {path}: {e}") from e

    tracker = CometTracker(experiment_name="suite")
    tracker.log_suite_metrics(summary.to_dict("records"))
    tracker.end()
    logger.info(
        f"Suite finished: {int((summary['status'] == 'ok').sum())}/{len(summary)} ok, "
        f"{len(config_errors)} rejected configs, summary at {path}"
    )
    return SuiteResult(summary, config_errors)


def format_summary(summary: pd.DataFrame) -> str:
    """Human-readable table of the summary's key columns."""
    if summary.empty:
        return "(no scenarios ran)"
    table = summary[["name", "length_km", "eq", "ber", "evm_percent", "status"]].copy()
    table["ber"] = table["ber"].map(lambda v: "-" if pd.isna(v) else f"{v:.3e}")
    table["evm_percent"] = table["evm_percent"].map(lambda v: "-" if pd.isna(v) else f"{v:.2f}")
    table["length_km"] = table["length_km"].map(lambda v: f"{v:g}")
    table["sha256"] = summary["report_sha256"].map(lambda v: "-" if pd.isna(v) else str(v)[:12])
    return table.to_string(index=False)
