"""End-to-end tests of the command line interface (exit codes and files)."""

import json

import numpy as np
import pytest

from dirmusic import io as dio
from dirmusic.cli import EXIT_IO, EXIT_NO_PULSE, EXIT_OK, EXIT_PARSE, EXIT_USAGE, main
from dirmusic.manifold import ArrayConfig, steering_vector
from dirmusic.pattern import DEFAULT_PATTERN, eval_pattern
from dirmusic.pipeline import Recording
from dirmusic.signal import PulseModel, SamplingSpec, pd_pulse, synthesize_clean


def _write_recording(path, theta=93.0, offsets=(0.0, 60.0, 120.0, 180.0), noise=True):
    rng = np.random.default_rng(5)
    array = ArrayConfig(offsets)
    gains = steering_vector(DEFAULT_PATTERN, array, theta)
    pulse = pd_pulse(PulseModel(), SamplingSpec(10e9, 256))
    channels = np.zeros((array.n_elements, 4096))
    channels[:, 1500:1756] = synthesize_clean(gains, pulse)
    if noise:
        sigma = np.sqrt(np.mean(channels**2) / 10.0)
        channels = channels + rng.normal(0.0, sigma, channels.shape)
    dio.write_waveform_csv(path, Recording(rate_hz=10e9, channels=channels))


class TestFitPattern:
    def test_fit_demo_samples(self, tmp_path):
        samples = tmp_path / "samples.csv"
        angles = np.arange(0.0, 360.0, 2.0)
        dio.write_pattern_samples_csv(samples, angles, eval_pattern(DEFAULT_PATTERN, angles))
        out = tmp_path / "fit.csv"
        code = main(["fit-pattern", str(samples), "--components", "3", "--out", str(out)])
        assert code == EXIT_OK
        fitted = dio.read_pattern_csv(out)
        got = eval_pattern(fitted, angles)
        want = eval_pattern(DEFAULT_PATTERN, angles)
        assert np.sqrt(np.mean((got - want) ** 2)) <= 1e-4 * want.max()

    def test_zero_components_is_usage_error(self, tmp_path):
        samples = tmp_path / "samples.csv"
        dio.write_pattern_samples_csv(samples, [0.0, 1.0, 2.0], [1.0, 1.0, 1.0])
        code = main(["fit-pattern", str(samples), "--components", "0", "--out", str(tmp_path / "x.csv")])
        assert code == EXIT_USAGE

    def test_missing_file_is_io_error(self, tmp_path, capsys):
        code = main(["fit-pattern", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "x.csv")])
        assert code == EXIT_IO
        assert "nope.csv" in capsys.readouterr().err


class TestManifoldDump:
    def test_writes_grid_csv(self, tmp_path):
        out = tmp_path / "manifold.csv"
        code = main(["manifold", "--elements", "6", "--grid-step", "90", "--out", str(out)])
        assert code == EXIT_OK
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "angle_deg,g1,g2,g3,g4,g5,g6"
        assert len(lines) == 5  # header + 4 grid angles


class TestSimulate:
    def test_writes_trials_and_summary_deterministically(self, tmp_path):
        args = [
            "simulate", "--trials", "12", "--snr-db", "10", "--seed", "7",
            "--out", str(tmp_path / "run"),
        ]
        assert main(args) == EXIT_OK
        trials_a = (tmp_path / "run_trials.csv").read_bytes()
        summary_a = (tmp_path / "run_summary.json").read_bytes()
        assert main(args) == EXIT_OK
        assert (tmp_path / "run_trials.csv").read_bytes() == trials_a
        assert (tmp_path / "run_summary.json").read_bytes() == summary_a
        payload = json.loads(summary_a)
        assert payload["n_trials"] == 12
        assert 0.0 <= payload["accuracy"] <= 1.0


class TestSweeps:
    def test_snr_sweep_files(self, tmp_path):
        code = main(
            ["sweep-snr", "--snr-db", "10", "--trials", "8", "--out", str(tmp_path / "snr")]
        )
        assert code == EXIT_OK
        assert (tmp_path / "snr.csv").exists()
        payload = json.loads((tmp_path / "snr.json").read_text())
        assert payload["rows"][0]["n"] == 8

    def test_empty_snr_list_is_usage_error(self, tmp_path):
        code = main(["sweep-snr", "--snr-db", "--trials", "8", "--out", str(tmp_path / "x")])
        assert code == EXIT_USAGE

    def test_config_file_supplies_values(self, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({
            "schema_version": 1, "elements": 4, "snr_db": [10.0], "trials": 6, "seed": 3,
        }))
        code = main(["sweep-snr", "--config", str(config), "--out", str(tmp_path / "cfg")])
        assert code == EXIT_OK
        payload = json.loads((tmp_path / "cfg.json").read_text())
        assert payload["config"]["n_elements"] == 4
        assert payload["config"]["seed"] == 3

    def test_bad_schema_version_is_parse_error(self, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"schema_version": 99}))
        code = main(["sweep-snr", "--config", str(config), "--out", str(tmp_path / "x")])
        assert code == EXIT_PARSE

    def test_element_sweep_runs(self, tmp_path):
        code = main(
            ["sweep-elements", "--elements-list", "2", "4", "--trials", "6",
             "--out", str(tmp_path / "el")]
        )
        assert code == EXIT_OK

    def test_error_sweep_runs(self, tmp_path):
        code = main(
            ["sweep-error", "--epsilon", "0.05", "--trials", "6", "--out", str(tmp_path / "eps")]
        )
        assert code == EXIT_OK


class TestEstimate:
    def test_recovers_direction_from_fixture(self, tmp_path):
        wave = tmp_path / "wave.csv"
        _write_recording(wave)
        out = tmp_path / "result.json"
        code = main([
            "estimate", str(wave), "--offsets", "0,60,120,180",
            "--taps", "1001", "--out", str(out),
        ])
        assert code == EXIT_OK
        payload = json.loads(out.read_text())
        err = abs(payload["theta_hat_deg"] - 93.0)
        assert min(err, 360.0 - err) <= 2.0
        assert payload["n_elements"] == 4
        span = (payload["window_end_s"] - payload["window_start_s"]) * 10e9
        assert payload["snapshots_used"] == pytest.approx(span)

    def test_malformed_csv_is_parse_error(self, tmp_path, capsys):
        wave = tmp_path / "bad.csv"
        wave.write_text("time_s,ch1,bogus\n0.0,1.0,2.0\n1e-10,1.0,2.0\n")
        code = main(["estimate", str(wave), "--elements", "2"])
        assert code == EXIT_PARSE
        assert "bogus" in capsys.readouterr().err

    def test_element_count_mismatch_is_parse_error(self, tmp_path):
        wave = tmp_path / "wave.csv"
        _write_recording(wave)
        code = main(["estimate", str(wave), "--elements", "6"])
        assert code == EXIT_PARSE

    def test_no_pulse_exit_code(self, tmp_path):
        rng = np.random.default_rng(0)
        wave = tmp_path / "noise.csv"
        dio.write_waveform_csv(
            wave, Recording(rate_hz=10e9, channels=rng.normal(size=(4, 4096)))
        )
        code = main(["estimate", str(wave), "--offsets", "0,60,120,180", "--taps", "1001"])
        assert code == EXIT_NO_PULSE

    def test_unknown_subcommand_is_usage_error(self):
        assert main(["frobnicate"]) == EXIT_USAGE
