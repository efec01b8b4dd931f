import hashlib
import json
import logging
from unittest.mock import MagicMock, patch

import numpy as np
import pandas as pd
import pytest

import app
from config.presets import PRESETS
from src.link_metrics.quality import BerReport
from src.scenarios.batch_runner import SUMMARY_COLUMNS, SUMMARY_FILE, format_summary, run_suite
from src.scenarios.config_loader import MIN_SYMBOLS, build_config, default_config, load_config
from src.scenarios.runner import (
    CONSTELLATION_FILE,
    REPORT_FILE,
    TAPS_FILE,
    TIMING_FILE,
    MetricsReport,
    run_scenario,
    simulate,
)
from src.utils.errors import ConfigInvalidError, NoAlignmentError, ScenarioError


@pytest.fixture(autouse=True)
def no_tracking():
    with patch("src.scenarios.runner.CometTracker") as tracker_cls, \
            patch("src.scenarios.batch_runner.CometTracker"):
        yield tracker_cls


def _fake_report(cfg, out_dir=None):
    return MetricsReport(
        scenario=cfg.name,
        ber=BerReport(bit_errors=0, bits_compared=1000, ber=0.0),
        evm_percent=5.0,
        cma_cost_final=0.1,
        tap_summary={},
        config=cfg.resolved,
        report_sha256="ab" * 32,
    )


class TestConfigLoader:
    def test_defaults_cover_every_section(self):
        doc = default_config()
        for section in ("laser", "modulator", "driver", "fiber", "edfa", "receiver", "equalizer", "metrics"):
            assert isinstance(doc[section], dict)
        assert "v_pi_v" in doc["modulator"]
        assert "mu_per_s" in doc["equalizer"]
        assert "wavelength_nm" not in doc["fiber"]

    def test_empty_document_resolves_to_defaults(self):
        cfg = build_config({})
        assert cfg.resolved == default_config()
        assert cfg.n_symbols == 100_000

    def test_renamed_keys_reach_config_objects(self):
        cfg = build_config({"modulator": {"v_pi_v": 3.5}, "equalizer": {"mu_per_s": 2e6}})
        assert cfg.modulator.v_pi == 3.5
        assert cfg.equalizer.mu == 2e6

    def test_fiber_wavelength_follows_laser(self):
        cfg = build_config({"laser": {"wavelength_nm": 1310.0}})
        assert cfg.fiber.wavelength_nm == 1310.0

    def test_overrides_apply_last(self):
        cfg = build_config({"seed": 3}, overrides={"seed": 9, "equalizer": {"enabled": False}})
        assert cfg.seed == 9
        assert not cfg.equalizer.enabled
        assert cfg.resolved["seed"] == 9

    @pytest.mark.parametrize("document, fragment", [
        ({"laser": {"colour": "red"}}, "laser.colour"),
        ({"bogus": 1}, "bogus"),
        ({"laser": 5}, "laser"),
        ({"schema_version": 2}, "schema_version"),
        ({"n_symbols": MIN_SYMBOLS - 1}, "n_symbols"),
        ({"seed": -1}, "seed"),
        ({"seed": True}, "seed"),
        ({"sop_seed": "x"}, "sop_seed"),
        ({"name": "a/b"}, "name"),
        ({"prbs_order": 8}, "prbs_order"),
        ({"pulse": "sinc"}, "pulse"),
        ({"laser": {"linewidth_hz": -1.0}}, "laser"),
        ({"equalizer": {"mu_per_s": -5.0}}, "equalizer"),
        ({"metrics": {"warmup_fraction": 1.0}}, "metrics"),
    ])
    def test_invalid_documents(self, document, fragment):
        with pytest.raises(ConfigInvalidError) as excinfo:
            build_config(document, source="bad.json")
        assert fragment in str(excinfo.value)
        assert excinfo.value.source == "bad.json"

    def test_non_object_document(self):
        with pytest.raises(ConfigInvalidError):
            build_config([1, 2, 3])

    def test_load_preset(self):
        cfg = load_config("l80km-eq", seed=5, no_eq=True)
        assert cfg.source == "preset:l80km-eq"
        assert cfg.name == "l80km-eq"
        assert cfg.seed == 5
        assert cfg.fiber.length_km == 80.0
        assert cfg.edfa.enabled
        assert not cfg.equalizer.enabled

    def test_load_file(self, write_json):
        path = write_json("short.json", {"name": "short", "n_symbols": 20_000})
        cfg = load_config(path)
        assert cfg.source == str(path)
        assert cfg.n_symbols == 20_000

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigInvalidError):
            load_config(tmp_path / "nope.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigInvalidError, match="invalid JSON"):
            load_config(path)

    def test_echo_is_canonical(self):
        a = build_config({"seed": 4, "laser": {"linewidth_hz": 0.0}})
        b = build_config({"laser": {"linewidth_hz": 0.0}, "seed": 4})
        assert a.echo_json() == b.echo_json()
        assert json.loads(a.echo_json()) == a.resolved


class TestRunner:
    def test_ideal_link_is_error_free(self, make_config, tmp_path):
        report = run_scenario(make_config(), tmp_path)
        assert report.ber.bit_errors == 0
        assert report.ber.bits_compared > 0
        assert report.ber.alignment is not None
        assert report.evm_percent < 30
        assert report.pol_extinction_db >= 30
        assert not report.equalizer_enabled

    def test_outputs_written(self, make_config, tmp_path):
        report = run_scenario(make_config(), tmp_path)
        scenario_dir = tmp_path / "ideal"
        assert report.output_dir == scenario_dir
        for name in (REPORT_FILE, CONSTELLATION_FILE, TAPS_FILE, TIMING_FILE):
            assert (scenario_dir / name).exists()

        raw = (scenario_dir / REPORT_FILE).read_bytes()
        assert hashlib.sha256(raw).hexdigest() == report.report_sha256
        document = json.loads(raw)
        assert "runtime_s" not in document
        assert document["report_schema_version"] == 1
        assert document["config"] == make_config().resolved
        assert document["ber"]["bit_errors"] == 0
        assert document["ber"]["zero_error_bound"] == pytest.approx(1 / report.ber.bits_compared)

        timing = json.loads((scenario_dir / TIMING_FILE).read_text(encoding="utf-8"))
        assert timing["scenario"] == "ideal"
        assert timing["runtime_s"] >= 0

        constellation = pd.read_csv(scenario_dir / CONSTELLATION_FILE, comment="#")
        assert len(constellation) > 0

    def test_runs_are_byte_identical(self, make_config, tmp_path):
        cfg = make_config(receiver={"thermal_noise_a_rthz": 20e-12}, laser={"linewidth_hz": 100e3})
        run_scenario(cfg, tmp_path / "first")
        run_scenario(cfg, tmp_path / "second")
        for name in (REPORT_FILE, CONSTELLATION_FILE, TAPS_FILE):
            assert (tmp_path / "first" / "ideal" / name).read_bytes() == \
                (tmp_path / "second" / "ideal" / name).read_bytes()

    def test_sop_seed_changes_rotation_not_bits(self, make_config):
        a = simulate(make_config(sop_seed=1))
        b = simulate(make_config(sop_seed=2))
        np.testing.assert_array_equal(a.extras["tx_symbols"].symbols, b.extras["tx_symbols"].symbols)
        assert a.extras["seeds"]["sop"] != b.extras["seeds"]["sop"]
        assert a.report.ber.bit_errors == b.report.ber.bit_errors == 0

    def test_module_error_becomes_scenario_error(self, make_config, tmp_path):
        with patch("src.scenarios.runner.resolve_ambiguity", side_effect=NoAlignmentError("lost")):
            with pytest.raises(ScenarioError) as excinfo:
                run_scenario(make_config(), tmp_path)
        assert excinfo.value.scenario == "ideal"
        assert isinstance(excinfo.value.cause, NoAlignmentError)
        assert not (tmp_path / "ideal" / REPORT_FILE).exists()

    def test_tracker_receives_report(self, make_config, tmp_path):
        tracker = MagicMock()
        report = run_scenario(make_config(), tmp_path, tracker=tracker)
        resolved, logged = tracker.log_scenario.call_args[0]
        assert logged == report.to_dict()
        tracker.log_cost_trace.assert_called_once()
        tracker.end.assert_not_called()


class TestSuite:
    def test_invalid_config_is_reported_and_left_out(self, write_json, tmp_path, caplog):
        bad = write_json("bad.json", {"n_symbols": 5})
        with patch("src.scenarios.batch_runner.run_scenario", side_effect=_fake_report) as run:
            with caplog.at_level(logging.ERROR, logger="src.scenarios.batch_runner"):
                result = run_suite(["b2b", str(bad), "l20km-eq"], max_workers=2, out_dir=tmp_path)

        assert run.call_count == 2
        summary = result.summary
        assert list(summary.columns) == SUMMARY_COLUMNS
        assert list(summary["name"]) == ["b2b", "l20km-eq"]
        assert list(summary["status"]) == ["ok", "ok"]
        assert summary.loc[1, "eq"] == "on"
        assert not result.ok
        assert len(result.config_errors) == 1
        assert "bad.json" in result.config_errors[0]
        assert "n_symbols" in result.config_errors[0]
        assert "bad.json" in caplog.text

        written = pd.read_csv(tmp_path / SUMMARY_FILE)
        assert list(written.columns) == SUMMARY_COLUMNS
        assert len(written) == 2

    def test_all_presets(self, tmp_path):
        with patch("src.scenarios.batch_runner.run_scenario", side_effect=_fake_report) as run:
            result = run_suite(list(PRESETS), out_dir=tmp_path)
        assert run.call_count == 6
        assert result.ok
        summary = result.summary
        assert list(summary["name"]) == list(PRESETS)
        assert set(summary["status"]) == {"ok"}

    def test_scenario_error_row(self, tmp_path):
        def explode(cfg, out_dir=None):
            raise ScenarioError(cfg.name, NoAlignmentError("lost"))

        with patch("src.scenarios.batch_runner.run_scenario", side_effect=explode):
            summary = run_suite(["b2b"], out_dir=tmp_path).summary
        assert summary.loc[0, "status"] == "scenario-error"
        assert "NoAlignmentError" in summary.loc[0, "error"]

    def test_duplicate_names_rejected(self, tmp_path):
        with patch("src.scenarios.batch_runner.run_scenario", side_effect=_fake_report) as run:
            result = run_suite(["b2b", "b2b"], out_dir=tmp_path)
        run.assert_not_called()
        assert result.summary.empty
        assert len(result.config_errors) == 2
        assert all("'b2b'" in message for message in result.config_errors)

    def test_overrides_reach_every_scenario(self, tmp_path):
        seen = []

        def record(cfg, out_dir=None):
            seen.append((cfg.seed, cfg.equalizer.enabled))
            return _fake_report(cfg)

        with patch("src.scenarios.batch_runner.run_scenario", side_effect=record):
            run_suite(["b2b-eq", "l20km-eq"], max_workers=1, out_dir=tmp_path, seed=3, no_eq=True)
        assert seen == [(3, False), (3, False)]

    def test_empty_suite(self, tmp_path):
        with pytest.raises(ValueError):
            run_suite([], out_dir=tmp_path)

    def test_format_summary(self, write_json, tmp_path):
        bad = write_json("bad.json", {"unknown": 1})
        with patch("src.scenarios.batch_runner.run_scenario", side_effect=_fake_report):
            result = run_suite(["b2b", str(bad)], out_dir=tmp_path)
        text = format_summary(result.summary)
        assert "b2b" in text
        assert "ok" in text
        assert "bad.json" not in text
        assert format_summary(result.summary.iloc[0:0]) == "(no scenarios ran)"
        assert "0.000e+00" in text


class TestCli:
    def test_presets_list(self, capsys):
        assert app.main(["presets", "list"]) == 0
        out = capsys.readouterr().out
        for name in PRESETS:
            assert name in out

    def test_exported_presets_reload_identically(self, tmp_path, capsys):
        assert app.main(["presets", "export", str(tmp_path)]) == 0
        for name in PRESETS:
            exported = load_config(tmp_path / f"{name}.json")
            assert exported.echo_json() == load_config(name).echo_json()

    def test_suite_without_configs_is_usage_error(self):
        with pytest.raises(SystemExit) as excinfo:
            app.main(["suite"])
        assert excinfo.value.code == 2

    def test_run_bad_config(self, write_json, tmp_path):
        bad = write_json("bad.json", {"laser": {"colour": "red"}})
        assert app.main(["run", str(bad), "--out", str(tmp_path)]) == 2

    def test_run_scenario_error(self, tmp_path):
        with patch("app.run_scenario", side_effect=ScenarioError("b2b", NoAlignmentError("lost"))):
            assert app.main(["run", "b2b", "--out", str(tmp_path)]) == 1

    def test_run_ideal(self, make_config, write_json, tmp_path, capsys):
        path = write_json("ideal.json", make_config().resolved)
        assert app.main(["run", str(path), "--out", str(tmp_path / "out")]) == 0
        out = capsys.readouterr().out
        assert "ideal: BER 0.000e+00" in out
        assert (tmp_path / "out" / "ideal" / REPORT_FILE).exists()

    def test_suite_exit_codes(self, write_json, tmp_path):
        bad = write_json("bad.json", {"n_symbols": 1})
        with patch("src.scenarios.batch_runner.run_scenario", side_effect=_fake_report):
            assert app.main(["suite", "b2b", "--out", str(tmp_path)]) == 0
            assert app.main(["suite", "b2b", str(bad), "--out", str(tmp_path)]) == 2

        def explode(cfg, out_dir=None):
            raise ScenarioError(cfg.name, NoAlignmentError("lost"))

        with patch("src.scenarios.batch_runner.run_scenario", side_effect=explode):
            assert app.main(["suite", "b2b", "--out", str(tmp_path)]) == 1
