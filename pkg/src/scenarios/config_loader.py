"""
Scenario configuration: JSON documents with unit-suffixed keys merged onto defaults.

A config file only needs the keys it changes. Loading validates the document,
builds the per-module config objects and keeps the fully resolved dictionary,
which is echoed verbatim into the scenario report.
"""
import copy
import json
import logging
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from config.presets import PRESETS
from config.settings import (
    CONFIG_SCHEMA_VERSION,
    DEFAULT_PRBS_ORDER,
    DEFAULT_SAMPLES_PER_SYMBOL,
    DEFAULT_SYMBOL_RATE_BAUD,
)
from src.equalizer.cma import EqConfig
from src.fiber_channel.amplifier import EdfaConfig
from src.fiber_channel.dispersion import FiberConfig
from src.receiver.coherent_frontend import ReceiverConfig
from src.signal_core.bitstreams import PRBS_TAPS
from src.signal_core.pulse_shaping import PULSES
from src.transmitter.chain import TransmitterConfig
from src.transmitter.driver import DriverConfig
from src.transmitter.laser import LaserConfig
from src.transmitter.modulator import ModulatorConfig
from src.utils.errors import ConfigInvalidError

logger = logging.getLogger(__name__)

MIN_SYMBOLS = 10_000


@dataclass(frozen=True)
class MetricsConfig:
    warmup_fraction: float = 0.25
    search_window_symbols: int = 4096
    max_delay_symbols: int = 64
    # None selects the eye centre automatically
    sampling_offset_samples: Optional[int] = None

    def __post_init__(self):
        if not 0 <= self.warmup_fraction < 1:
            raise ValueError(f"warmup_fraction must lie in [0, 1), got {self.warmup_fraction}")
        if self.search_window_symbols < 1:
            raise ValueError("search_window_symbols must be >= 1")
        if self.max_delay_symbols < 0:
            raise ValueError("max_delay_symbols must be >= 0")
        if self.sampling_offset_samples is not None and self.sampling_offset_samples < 0:
            raise ValueError("sampling_offset_samples must be >= 0")


# JSON key -> dataclass field, where the field name carries no unit suffix.
_RENAMES = {
    "modulator": {"v_pi_v": "v_pi"},
    "equalizer": {"mu_per_s": "mu"},
}

# Derived from other sections rather than configured directly.
_EXCLUDED = {
    "fiber": {"wavelength_nm"},
}

_SECTIONS = {
    "laser": LaserConfig,
    "modulator": ModulatorConfig,
    "driver": DriverConfig,
    "fiber": FiberConfig,
    "edfa": EdfaConfig,
    "receiver": ReceiverConfig,
    "equalizer": EqConfig,
    "metrics": MetricsConfig,
}


def _section_defaults(section: str, cls) -> Dict[str, Any]:
    to_key = {v: k for k, v in _RENAMES.get(section, {}).items()}
    excluded = _EXCLUDED.get(section, set())
    return {
        to_key.get(f.name, f.name): f.default
        for f in fields(cls)
        if f.name not in excluded
    }


def default_config() -> Dict[str, Any]:
    """The complete configuration every document is merged onto."""
    doc = {
        "schema_version": CONFIG_SCHEMA_VERSION,
        "name": "scenario",
        "n_symbols": 100_000,
        "seed": 1,
        "sop_seed": None,
        "prbs_order": DEFAULT_PRBS_ORDER,
        "symbol_rate_baud": DEFAULT_SYMBOL_RATE_BAUD,
        "samples_per_symbol": DEFAULT_SAMPLES_PER_SYMBOL,
        "pulse": "nrz",
        "rolloff": 0.35,
    }
    for section, cls in _SECTIONS.items():
        doc[section] = _section_defaults(section, cls)
    return doc


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    name: str
    n_symbols: int
    seed: int
    sop_seed: Optional[int]
    prbs_order: int
    transmitter: TransmitterConfig
    fiber: FiberConfig
    edfa: EdfaConfig
    receiver: ReceiverConfig
    equalizer: EqConfig
    metrics: MetricsConfig
    resolved: Dict[str, Any] = field(default_factory=dict, repr=False)
    source: str = "<memory>"

    @property
    def laser(self) -> LaserConfig:
        return self.transmitter.laser

    @property
    def modulator(self) -> ModulatorConfig:
        return self.transmitter.modulator

    @property
    def driver(self) -> DriverConfig:
        return self.transmitter.driver

    def echo_json(self) -> str:
        """Canonical serialization of the resolved config."""
        return json.dumps(self.resolved, sort_keys=True)


def _merge(base: Dict[str, Any], overrides: Dict[str, Any], source: str, path: str = "") -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in overrides.items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigInvalidError(f"unknown key '{where}'", source)
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigInvalidError(f"'{where}' must be an object", source)
            merged[key] = _merge(base[key], value, source, f"{where}.")
        else:
            merged[key] = value
    return merged


def _build_section(section: str, values: Dict[str, Any], source: str, **extra):
    renames = _RENAMES.get(section, {})
    kwargs = {renames.get(k, k): v for k, v in values.items()}
    kwargs.update(extra)
    try:
        return _SECTIONS[section](**kwargs)
    except (TypeError, ValueError) as e:
        raise ConfigInvalidError(f"{section}: {e}", source) from e


def _require_int(doc: Dict[str, Any], key: str, source: str, minimum: int) -> int:
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigInvalidError(f"'{key}' must be an integer, got {value!r}", source)
    if value < minimum:
        raise ConfigInvalidError(f"'{key}' must be >= {minimum}, got {value}", source)
    return value


def build_config(document: Dict[str, Any], source: str = "<memory>", overrides: Optional[Dict[str, Any]] = None) -> ScenarioConfig:
    """
    Merge a config document onto the defaults, apply overrides and validate.

    Args:
        document (Dict[str, Any]): Parsed JSON document (partial or complete).
        source (str): File name or preset name, used in error messages.
        overrides (Dict[str, Any], optional): Extra partial document applied last,
            e.g. {"seed": 7} or {"equalizer": {"enabled": False}}.

    Returns:
        ScenarioConfig: Validated configuration with the resolved dictionary attached.
    """
    if not isinstance(document, dict):
        raise ConfigInvalidError("config document must be a JSON object", source)
    version = document.get("schema_version", CONFIG_SCHEMA_VERSION)
    if version != CONFIG_SCHEMA_VERSION:
        raise ConfigInvalidError(
            f"unsupported schema_version {version!r} (expected {CONFIG_SCHEMA_VERSION})", source
        )
    resolved = _merge(default_config(), document, source)
    if overrides:
        resolved = _merge(resolved, overrides, source)

    name = resolved["name"]
    if not isinstance(name, str) or not name or "/" in name or "\\" in name:
        raise ConfigInvalidError(f"'name' must be a nonempty string usable as a directory, got {name!r}", source)
    n_symbols = _require_int(resolved, "n_symbols", source, MIN_SYMBOLS)
    seed = _require_int(resolved, "seed", source, 0)
    if resolved["sop_seed"] is not None:
        _require_int(resolved, "sop_seed", source, 0)
    prbs_order = resolved["prbs_order"]
    if prbs_order not in PRBS_TAPS:
        raise ConfigInvalidError(f"prbs_order must be one of {sorted(PRBS_TAPS)}, got {prbs_order!r}", source)
    if resolved["pulse"] not in PULSES:
        raise ConfigInvalidError(f"pulse must be one of {PULSES}, got {resolved['pulse']!r}", source)

    laser = _build_section("laser", resolved["laser"], source)
    try:
        transmitter = TransmitterConfig(
            laser=laser,
            modulator=_build_section("modulator", resolved["modulator"], source),
            driver=_build_section("driver", resolved["driver"], source),
            symbol_rate_baud=float(resolved["symbol_rate_baud"]),
            samples_per_symbol=_require_int(resolved, "samples_per_symbol", source, 2),
            pulse=resolved["pulse"],
            rolloff=float(resolved["rolloff"]),
        )
    except (TypeError, ValueError) as e:
        if isinstance(e, ConfigInvalidError):
            raise
        raise ConfigInvalidError(f"transmitter: {e}", source) from e

    cfg = ScenarioConfig(
        name=name,
        n_symbols=n_symbols,
        seed=seed,
        sop_seed=resolved["sop_seed"],
        prbs_order=prbs_order,
        transmitter=transmitter,
        fiber=_build_section("fiber", resolved["fiber"], source, wavelength_nm=laser.wavelength_nm),
        edfa=_build_section("edfa", resolved["edfa"], source),
        receiver=_build_section("receiver", resolved["receiver"], source),
        equalizer=_build_section("equalizer", resolved["equalizer"], source),
        metrics=_build_section("metrics", resolved["metrics"], source),
        resolved=resolved,
        source=source,
    )
    logger.debug(f"Loaded scenario '{name}' from {source}")
    return cfg


def read_document(path_or_preset: Union[str, Path]) -> Tuple[Dict[str, Any], str]:
    """Parse a config file, or look up a bundled preset by name."""
    path = Path(path_or_preset)
    if not path.exists() and str(path_or_preset) in PRESETS:
        return copy.deepcopy(PRESETS[str(path_or_preset)]), f"preset:{path_or_preset}"
    source = str(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f), source
    except FileNotFoundError as e:
        raise ConfigInvalidError("no such config file or preset", source) from e
    except json.JSONDecodeError as e:
        raise ConfigInvalidError(f"invalid JSON: {e}", source) from e
    except OSError as e:
        raise ConfigInvalidError(f"cannot read config: {e}", source) from e


def load_config(path_or_preset: Union[str, Path], seed: Optional[int] = None, no_eq: bool = False) -> ScenarioConfig:
    """Load a scenario from a JSON file or preset name, applying CLI overrides."""
    document, source = read_document(path_or_preset)
    overrides: Dict[str, Any] = {}
    if seed is not None:
        overrides["seed"] = seed
    if no_eq:
        overrides["equalizer"] = {"enabled": False}
    return build_config(document, source, overrides)
