"""Round-trip and format-validation tests for the file formats."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dirmusic import io as dio
from dirmusic.experiments import SweepReport, SweepRow, TrialReport
from dirmusic.pattern import DEFAULT_PATTERN
from dirmusic.pipeline import Recording


class TestPatternFiles:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "pattern.csv"
        dio.write_pattern_csv(path, DEFAULT_PATTERN)
        back = dio.read_pattern_csv(path)
        assert_allclose(back.as_params(), DEFAULT_PATTERN.as_params())

    def test_bad_header_names_offending_column(self, tmp_path):
        path = tmp_path / "pattern.csv"
        path.write_text("amplitude,middle_deg,width_deg\n1.0,10.0,20.0\n")
        with pytest.raises(ValueError, match="middle_deg"):
            dio.read_pattern_csv(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "pattern.csv"
        path.write_text("")
        with pytest.raises(ValueError):
            dio.read_pattern_csv(path)


class TestSampleFiles:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "samples.csv"
        angles = np.arange(0.0, 360.0, 5.0)
        gains = np.linspace(0.0, 1.0, angles.size)
        dio.write_pattern_samples_csv(path, angles, gains)
        a, g = dio.read_pattern_samples_csv(path)
        assert_allclose(a, angles)
        assert_allclose(g, gains)


class TestWaveformFiles:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        rec = Recording(rate_hz=10e9, channels=rng.normal(size=(4, 300)))
        path = tmp_path / "wave.csv"
        dio.write_waveform_csv(path, rec)
        back = dio.read_waveform_csv(path)
        assert back.rate_hz == pytest.approx(rec.rate_hz, rel=1e-9)
        assert_allclose(back.channels, rec.channels, rtol=1e-10, atol=1e-15)

    def test_bad_channel_header(self, tmp_path):
        path = tmp_path / "wave.csv"
        path.write_text("time_s,ch1,chX\n0.0,1.0,2.0\n1e-10,1.0,2.0\n")
        with pytest.raises(ValueError, match="chX"):
            dio.read_waveform_csv(path)

    def test_missing_time_column(self, tmp_path):
        path = tmp_path / "wave.csv"
        path.write_text("t,ch1\n0.0,1.0\n1e-10,1.0\n")
        with pytest.raises(ValueError, match="time_s"):
            dio.read_waveform_csv(path)

    def test_non_uniform_time_rejected(self, tmp_path):
        path = tmp_path / "wave.csv"
        path.write_text("time_s,ch1\n0.0,1.0\n1e-10,1.0\n5e-10,1.0\n")
        with pytest.raises(ValueError, match="uniform"):
            dio.read_waveform_csv(path)

    def test_decreasing_time_rejected(self, tmp_path):
        path = tmp_path / "wave.csv"
        path.write_text("time_s,ch1\n1e-10,1.0\n0.0,1.0\n")
        with pytest.raises(ValueError, match="increasing"):
            dio.read_waveform_csv(path)

    def test_ragged_row_rejected(self, tmp_path):
        path = tmp_path / "wave.csv"
        path.write_text("time_s,ch1,ch2\n0.0,1.0,2.0\n1e-10,1.0\n")
        with pytest.raises(ValueError, match="fields"):
            dio.read_waveform_csv(path)


class TestReportFiles:
    def _report(self):
        rows = (
            SweepRow(10.0, 1.0, 0.01, 0.3, -1.0, 1.0, 100),
            SweepRow(0.0, 0.8, -0.02, 1.1, -4.0, 5.0, 100),
        )
        return SweepReport(setting_name="snr_db", rows=rows)

    def test_sweep_csv_layout(self, tmp_path):
        path = tmp_path / "sweep.csv"
        dio.write_sweep_csv(path, self._report())
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "setting,accuracy,mean_err,std_err,min_err,max_err,n"
        assert len(lines) == 3
        assert lines[1].split(",")[0] == "10.0"

    def test_sweep_json_payload(self, tmp_path):
        import json

        path = tmp_path / "sweep.json"
        dio.write_sweep_json(path, self._report(), {"seed": 1})
        payload = json.loads(path.read_text())
        assert payload["schema_version"] == dio.SCHEMA_VERSION
        assert payload["setting_name"] == "snr_db"
        assert len(payload["rows"]) == 2
        assert payload["config"]["seed"] == 1

    def test_trials_csv(self, tmp_path):
        path = tmp_path / "trials.csv"
        trials = [TrialReport(10.0, 11.0, 1.0, True), TrialReport(20.0, 25.0, 5.0, False)]
        dio.write_trials_csv(path, trials)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "theta_true_deg,theta_hat_deg,error_deg,success"
        assert lines[1].endswith(",1")
        assert lines[2].endswith(",0")
