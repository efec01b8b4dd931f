import copy
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
sys.path.append(str(Path(__file__).resolve().parent.parent))

from src.scenarios.config_loader import build_config  # noqa: E402
from src.signal_core.bitstreams import INV_SQRT2  # noqa: E402

QPSK_POINTS = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) * INV_SQRT2

# Noiseless, distortion-free link with the equalizer off
IDEAL_DOCUMENT = {
    "name": "ideal",
    "n_symbols": 10_000,
    "seed": 11,
    "laser": {"linewidth_hz": 0.0},
    "driver": {"f3db_hz": None},
    "receiver": {"thermal_noise_a_rthz": 0.0},
    "equalizer": {"enabled": False},
}


def _deep_update(base: dict, updates: dict) -> dict:
    for key, value in updates.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _deep_update(base[key], value)
        else:
            base[key] = value
    return base


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def qpsk_symbols(rng):
    return QPSK_POINTS[rng.integers(0, 4, 4096)]


@pytest.fixture
def make_config():
    """Build a ScenarioConfig from the ideal document plus nested overrides."""
    def make(**updates):
        document = _deep_update(copy.deepcopy(IDEAL_DOCUMENT), updates)
        return build_config(document, source="test")
    return make


@pytest.fixture
def write_json(tmp_path):
    import json

    def write(name: str, document) -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return path
    return write
