"""
End-to-end scenario execution: bits in, BER/EVM report and CSV artifacts out.

Pipeline:
    PRBS -> transmitter -> fiber (CD + loss) -> SOP rotation -> EDFA (optional)
    -> receiver front-end -> CMA equalizer (or static pass) -> warm-up/guard
    discard -> eye-centre sampling -> phase/delay alignment -> BER, EVM
"""
import dataclasses
import hashlib
import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional

from config.settings import GUARD_SAMPLES, OUTPUT_DIR, REPORT_SCHEMA_VERSION, TOOL_VERSION
from src.analytics.comet_tracker import CometTracker
from src.equalizer.cma import TAP_NAMES, EqRunResult, equalizer_run, reset_taps
from src.equalizer.tap_export import export_taps
from src.fiber_channel.amplifier import edfa_amplify
from src.fiber_channel.dispersion import propagate
from src.fiber_channel.jones import pol_transform, random_sop_rotation
from src.link_metrics.decision import resolve_ambiguity, select_sampling_offset, symbol_sample
from src.link_metrics.export_manager import ConstellationDump, export_constellation
from src.link_metrics.quality import BerReport, ber_measure, evm_measure, normalize_power
from src.receiver.coherent_frontend import ReceiverOutput, receive
from src.scenarios.config_loader import ScenarioConfig
from src.scenarios.seeds import derive_seeds, prbs_seed
from src.signal_core.bitstreams import SymbolStream, prbs_generate, qpsk_demap
from src.transmitter.chain import transmit
from src.utils.errors import EmptyStreamsError, IoFailureError, ScenarioError, SimulationError

logger = logging.getLogger(__name__)

REPORT_FILE = "report.json"
CONSTELLATION_FILE = "constellation.csv"
TAPS_FILE = "taps.csv"
TIMING_FILE = "timing.json"

# Reference starts this many symbols after the first measured symbol, so small
# negative system delays still land inside the alignment search.
ALIGN_MARGIN_SYMBOLS = 4


@dataclass
class MetricsReport:
    scenario: str
    ber: BerReport
    evm_percent: float
    cma_cost_final: float
    tap_summary: Dict[str, Any]
    config: Dict[str, Any]
    tool_version: str = TOOL_VERSION
    equalizer_enabled: bool = True
    pol_extinction_db: float = 0.0
    voa_attenuation_db: float = 0.0
    sampling_offset_samples: int = 0
    symbols_measured: int = 0
    # Not serialized into report.json; see timing.json
    runtime_s: float = 0.0
    output_dir: Optional[Path] = None
    report_sha256: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "report_schema_version": REPORT_SCHEMA_VERSION,
            "tool_version": self.tool_version,
            "scenario": self.scenario,
            "ber": self.ber.as_dict(),
            "evm_percent": self.evm_percent,
            "cma_cost_final": self.cma_cost_final,
            "equalizer_enabled": self.equalizer_enabled,
            "tap_summary": self.tap_summary,
            "pol_extinction_db": self.pol_extinction_db,
            "voa_attenuation_db": self.voa_attenuation_db,
            "sampling_offset_samples": self.sampling_offset_samples,
            "symbols_measured": self.symbols_measured,
            "config": self.config,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


@dataclass(eq=False)
class ScenarioOutcome:
    """In-memory products of one run, before anything is written."""

    report: MetricsReport
    dump: ConstellationDump
    equalizer: EqRunResult
    receiver: ReceiverOutput
    extras: Dict[str, Any] = field(default_factory=dict)


def _tap_summary(eq: EqRunResult) -> Dict[str, Any]:
    taps = eq.final_taps
    summary = {
        name: [[float(h.real), float(h.imag)] for h in getattr(taps, name)]
        for name in TAP_NAMES
    }
    summary["max_magnitude"] = taps.max_magnitude()
    summary["tap_delay_samples"] = eq.tap_delay_samples
    return summary


def simulate(cfg: ScenarioConfig) -> ScenarioOutcome:
    """
    Run the full link for one scenario without touching the filesystem.

    Args:
        cfg (ScenarioConfig): Validated scenario.

    Returns:
        ScenarioOutcome: Report (runtime unset), constellation dump and stage results.
    """
    seeds = derive_seeds(cfg.seed, cfg.sop_seed)
    n = cfg.n_symbols
    sps = cfg.transmitter.samples_per_symbol
    wavelength = cfg.laser.wavelength_nm

    bits_i = prbs_generate(cfg.prbs_order, n, prbs_seed(seeds["prbs_i"], cfg.prbs_order))
    bits_q = prbs_generate(cfg.prbs_order, n, prbs_seed(seeds["prbs_q"], cfg.prbs_order))

    tx = transmit(bits_i, bits_q, cfg.transmitter, seeds["laser"])
    pol_field = propagate(tx.field, cfg.fiber)
    pol_field = pol_transform(pol_field, random_sop_rotation(seeds["sop"]))
    if cfg.edfa.enabled:
        pol_field = edfa_amplify(pol_field, cfg.edfa, seeds["edfa"], wavelength)

    rx = receive(pol_field, cfg.receiver, seeds["receiver"])

    guard_symbols = math.ceil(GUARD_SAMPLES / sps)
    warmup_symbols = int(round(cfg.metrics.warmup_fraction * n))
    start_symbol = max(warmup_symbols, guard_symbols)
    eq_cfg = cfg.equalizer
    eq = equalizer_run(
        rx.x_in, rx.y_in, eq_cfg, reset_taps(eq_cfg),
        adapt=eq_cfg.enabled, warmup_samples=start_symbol * sps,
    )

    measured = eq.x_eq.samples[: len(eq.x_eq) - guard_symbols * sps]
    if measured.size < sps:
        raise EmptyStreamsError(f"nothing left to measure after warm-up and guard ({n} symbols)")
    wave = eq.x_eq.with_samples(measured)

    offset = cfg.metrics.sampling_offset_samples
    if offset is None:
        offset = select_sampling_offset(wave, sps)
    sampled = symbol_sample(wave, sps, offset)

    ref_start = start_symbol + ALIGN_MARGIN_SYMBOLS
    aligned, alignment = resolve_ambiguity(
        sampled,
        bits_i[ref_start:],
        bits_q[ref_start:],
        window=cfg.metrics.search_window_symbols,
        max_delay=cfg.metrics.max_delay_symbols,
    )
    n_compare = min(len(aligned), n - ref_start)
    decided = SymbolStream(aligned.symbols[:n_compare])
    rx_i, rx_q = qpsk_demap(decided)
    ber = ber_measure(
        rx_i, rx_q, bits_i[ref_start:ref_start + n_compare], bits_q[ref_start:ref_start + n_compare]
    )
    ber = dataclasses.replace(ber, alignment=alignment)
    evm = evm_measure(normalize_power(decided))

    logger.info(
        f"Scenario '{cfg.name}': BER {ber.ber:.3e} ({ber.bit_errors}/{ber.bits_compared}), "
        f"EVM {evm:.2f}%"
    )
    report = MetricsReport(
        scenario=cfg.name,
        ber=ber,
        evm_percent=evm,
        cma_cost_final=float(eq.cost_trace[-1]),
        tap_summary=_tap_summary(eq),
        config=cfg.resolved,
        equalizer_enabled=eq_cfg.enabled,
        pol_extinction_db=rx.pol_search.extinction_db,
        voa_attenuation_db=rx.voa_attenuation_db,
        sampling_offset_samples=int(offset),
        symbols_measured=n_compare,
    )
    dump = ConstellationDump(cfg.name, sampled, scale=rx.scale_v_per_unit)
    return ScenarioOutcome(report, dump, eq, rx, extras={"seeds": seeds, "tx_symbols": tx.symbols})


def _write_text(path: Path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    except OSError as e:
        raise IoFailureError(f"Failed to write {path}: {e}") from e


def write_outputs(outcome: ScenarioOutcome, scenario_dir: Path) -> str:
    """Write report, constellation, taps and timing; returns the report's SHA-256."""
    try:
        scenario_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise IoFailureError(f"Failed to create {scenario_dir}: {e}") from e

    report = outcome.report
    text = report.to_json()
    _write_text(scenario_dir / REPORT_FILE, text)
    export_constellation(outcome.dump, scenario_dir / CONSTELLATION_FILE)
    export_taps(outcome.equalizer.tap_trajectory, scenario_dir / TAPS_FILE)
    _write_text(
        scenario_dir / TIMING_FILE,
        json.dumps({"scenario": report.scenario, "runtime_s": report.runtime_s}, indent=2) + "\n",
    )
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def run_scenario(
    cfg: ScenarioConfig,
    out_dir: Optional[Path] = None,
    tracker: Optional[CometTracker] = None,
) -> MetricsReport:
    """
    Simulate one scenario and write its artifacts under ``out_dir/<name>/``.

    Module errors are re-raised as ScenarioError carrying the scenario name.
    """
    out_dir = Path(out_dir) if out_dir is not None else OUTPUT_DIR
    started = time.perf_counter()
    logger.info(f"Running scenario '{cfg.name}' ({cfg.n_symbols} symbols, seed {cfg.seed})")
    try:
        outcome = simulate(cfg)
        outcome.report.runtime_s = round(time.perf_counter() - started, 3)
        scenario_dir = out_dir / cfg.name
        outcome.report.report_sha256 = write_outputs(outcome, scenario_dir)
        outcome.report.output_dir = scenario_dir
    except SimulationError as e:
        logger.error(f"Scenario '{cfg.name}' failed: {e}")
        raise ScenarioError(cfg.name, e) from e

    owns_tracker = tracker is None
    tracker = tracker or CometTracker(experiment_name=cfg.name)
    tracker.log_scenario(cfg.resolved, outcome.report.to_dict())
    tracker.log_cost_trace([float(c) for c in outcome.equalizer.cost_trace])
    if owns_tracker:
        tracker.end()

    logger.info(f"Scenario '{cfg.name}' finished in {outcome.report.runtime_s:.1f} s -> {scenario_dir}")
    return outcome.report
