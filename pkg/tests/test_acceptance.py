"""
End-to-end link behaviour on the bundled presets. These runs take minutes;
select them with ``pytest -m slow``.
"""
from unittest.mock import patch

import numpy as np
import pytest
from scipy import stats

from config.presets import PRESETS
from src.fiber_channel.jones import pol_transform, random_sop_rotation
from src.receiver.pol_controller import pol_control_search
from src.scenarios.batch_runner import run_suite
from src.scenarios.config_loader import build_config
from src.scenarios.runner import CONSTELLATION_FILE, REPORT_FILE, TAPS_FILE, simulate
from src.signal_core.waveforms import DualPolWaveform


@pytest.fixture(autouse=True)
def no_tracking():
    with patch("src.scenarios.runner.CometTracker"), patch("src.scenarios.batch_runner.CometTracker"):
        yield


@pytest.fixture(scope="module")
def preset_runs(tmp_path_factory):
    """Every preset, once with a single worker and once in parallel."""
    root = tmp_path_factory.mktemp("presets")
    with patch("src.scenarios.runner.CometTracker"), patch("src.scenarios.batch_runner.CometTracker"):
        serial = run_suite(list(PRESETS), max_workers=1, out_dir=root / "serial")
        parallel = run_suite(list(PRESETS), max_workers=3, out_dir=root / "parallel")
    return root, serial.summary.set_index("name"), parallel.summary.set_index("name")


@pytest.mark.slow
def test_presets_complete(preset_runs):
    _, serial, _ = preset_runs
    assert set(serial["status"]) == {"ok"}
    assert (serial["bits_compared"] > 0).all()


@pytest.mark.slow
@pytest.mark.parametrize("length", ["b2b", "l20km", "l80km"])
def test_equalizer_lowers_ber(preset_runs, length):
    _, serial, _ = preset_runs
    assert serial.loc[f"{length}-eq", "ber"] < serial.loc[length, "ber"]


@pytest.mark.slow
def test_equalized_ber_grows_with_reach(preset_runs):
    _, serial, _ = preset_runs
    ber = serial["ber"]
    assert ber["b2b-eq"] < ber["l20km-eq"] < ber["l80km-eq"]


@pytest.mark.slow
def test_worker_count_does_not_change_outputs(preset_runs):
    root, serial, parallel = preset_runs
    assert list(serial["report_sha256"]) == list(parallel["report_sha256"])
    for name in PRESETS:
        for artifact in (REPORT_FILE, CONSTELLATION_FILE, TAPS_FILE):
            assert (root / "serial" / name / artifact).read_bytes() == \
                (root / "parallel" / name / artifact).read_bytes()


@pytest.mark.slow
def test_linewidth_cancels_in_self_homodyne_detection():
    quiet = {"receiver": {"thermal_noise_a_rthz": 0.0}, "equalizer": {"enabled": False}}

    def detected(linewidth_hz, overrides):
        doc = dict(PRESETS["b2b-eq"], n_symbols=20_000)
        cfg = build_config(doc, "linewidth", {"laser": {"linewidth_hz": linewidth_hz}, **overrides})
        return simulate(cfg)

    coherent = detected(0.0, quiet)
    broad = detected(10e6, quiet)
    np.testing.assert_allclose(broad.receiver.x_in.samples, coherent.receiver.x_in.samples, rtol=0, atol=1e-10)

    noisy_narrow = detected(0.0, {})
    noisy_broad = detected(10e6, {})
    bits = noisy_narrow.report.ber.bits_compared
    p = max(noisy_narrow.report.ber.ber, 1.0 / bits)
    low, high = stats.binom.interval(0.95, bits, p)
    assert low <= noisy_broad.report.ber.bit_errors <= max(high, 1)


@pytest.mark.slow
def test_pol_control_over_random_scramblings():
    rng = np.random.default_rng(99)
    points = np.exp(1j * (np.pi / 4 + np.pi / 2 * rng.integers(0, 4, 4096)))
    x = 0.3 * np.concatenate([points, -points])
    field = DualPolWaveform.from_arrays(x, np.ones(x.size, dtype=complex), 100e9)

    reached = 0
    for seed in range(100):
        result = pol_control_search(pol_transform(field, random_sop_rotation(1000 + seed)))
        assert np.all(np.diff(result.objective_trace) >= 0)
        reached += result.extinction_db >= 30
    assert reached >= 95


def test_evm_and_ber_track_receiver_noise(make_config):
    evm, ber = [], []
    for density in (5e-12, 20e-12, 40e-12):
        outcome = simulate(make_config(receiver={"thermal_noise_a_rthz": density, "rx_power_dbm": -11.7}))
        evm.append(outcome.report.evm_percent)
        ber.append(outcome.report.ber.ber)
    assert evm[0] < evm[1] < evm[2]
    assert ber[0] <= ber[1] <= ber[2]


@pytest.mark.slow
def test_evm_orders_scenarios_like_ber(make_config):
    evm, ber = [], []
    for density in (5e-12, 20e-12, 40e-12, 60e-12, 80e-12):
        outcome = simulate(make_config(
            n_symbols=100_000,
            receiver={"thermal_noise_a_rthz": density, "rx_power_dbm": -11.7},
        ))
        evm.append(outcome.report.evm_percent)
        ber.append(outcome.report.ber.ber)
    by_evm = np.argsort(evm, kind="stable")
    assert list(by_evm) == [0, 1, 2, 3, 4]
    assert np.all(np.diff(np.asarray(ber)[by_evm]) >= 0)
    assert ber[-1] > ber[0]


@pytest.mark.slow
def test_ideal_link_is_error_free_over_long_record(make_config):
    outcome = simulate(make_config(n_symbols=100_000))
    assert outcome.report.ber.bit_errors == 0
    assert outcome.report.ber.bits_compared > 100_000
