import numpy as np
import pytest

from nvzfs.errors import ConfigError
from nvzfs.experiments import (
    EMIT_FILES,
    PRESET_DEFAULTS,
    PRESET_DESCRIPTIONS,
    oscillation_period,
    parse_config_text,
    resolve_config,
    run_config_text,
    validate_config,
)

BORON_SMALL = """
preset = boron_nqr
boron.eta = 0
sweep.points = 41
trace.samples = 51
emit = time_trace,sweep,eigensystem,estimate
"""

WATER_SMALL = """
preset = water_pair
sweep.points = 41
trace.samples = 51
emit = time_trace,sweep,eigensystem,estimate
"""

POLARIZATION_SMALL = """
preset = polarization_check
lab.t_max = 0.05
lab.samples = 51
"""

BIAS_SMALL = """
preset = conventional_bias_comparison
water.theta_points = 13
"""


class TestConfigParsing:
    def test_comments_and_blank_lines_ignored(self):
        raw = parse_config_text("# header\n\npreset = boron_nqr  # trailing\n")
        assert raw == {"preset": "boron_nqr"}

    def test_missing_equals_rejected(self):
        with pytest.raises(ConfigError):
            parse_config_text("preset boron_nqr")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError):
            parse_config_text("preset = a\npreset = b\n")

    def test_unknown_key_names_field(self):
        with pytest.raises(ConfigError) as exc:
            resolve_config("preset = boron_nqr\nboron.qbr = 3\n")
        assert exc.value.field == "boron.qbr"

    def test_key_for_wrong_preset_rejected(self):
        with pytest.raises(ConfigError) as exc:
            resolve_config("preset = boron_nqr\nwater.d = 0.2\n")
        assert exc.value.field == "water.d"

    def test_type_error_names_field(self):
        with pytest.raises(ConfigError) as exc:
            resolve_config("preset = boron_nqr\nboron.qbar = three\n")
        assert exc.value.field == "boron.qbar"

    def test_missing_preset(self):
        with pytest.raises(ConfigError) as exc:
            resolve_config("boron.qbar = 3\n")
        assert exc.value.field == "preset"

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            resolve_config("preset = carbon_pair\n")

    def test_negative_distance_rejected(self):
        with pytest.raises(ConfigError) as exc:
            resolve_config("preset = water_pair\nwater.d = -0.2\n")
        assert exc.value.field == "water.d"

    def test_defaults_and_overrides_tracked(self):
        config = resolve_config(BORON_SMALL)
        sources = {p.key: p.source for p in config.parameters}
        assert sources["boron.eta"] == "override"
        assert sources["boron.qbar"] == "default"


class TestValidateReport:
    def test_defaults_all_listed(self):
        report = validate_config("preset = water_pair\n")
        assert report.ok
        keys = {p.key for p in report.parameters}
        assert keys == set(PRESET_DEFAULTS["water_pair"]) | {"preset"}
        assert all(p.source == "default" for p in report.parameters if p.key != "preset")

    def test_large_axial_coupling_warns(self):
        report = validate_config(
            "preset = boron_nqr\nboron.a_z = 1.5\n"
        )
        assert report.ok
        warning = [c for c in report.checks if c.level == "warning"]
        assert warning and "pseudosecular" in warning[0].message

    def test_hard_error_reported_not_raised(self):
        report = validate_config("preset = water_pair\nwater.d = -1\n")
        assert not report.ok
        assert report.checks[0].level == "error"
        assert report.checks[0].name == "water.d"

    def test_eta_above_one_warns(self):
        report = validate_config("preset = boron_nqr\nboron.eta = 0,1.5\n")
        assert any(c.level == "warning" and "eta" in c.name for c in report.checks)


class TestRunners:
    def test_boron_outputs(self):
        result = run_config_text(BORON_SMALL, jobs=1)
        assert set(result.files) == {
            "fig2b.csv",
            "fig2c.csv",
            "eigensystem.csv",
            "estimate.csv",
            "manifest.txt",
        }
        header = result.files["fig2b.csv"].splitlines()[0]
        assert header == "t_us,S_eta0"
        assert "schema.fig2b.csv = fig2b.v1" in result.files["manifest.txt"]

    def test_boron_multiple_eta_columns(self):
        result = run_config_text(
            "preset = boron_nqr\nsweep.points = 21\ntrace.samples = 21\n", jobs=1
        )
        header = result.files["fig2b.csv"].splitlines()[0]
        assert header == "t_us,S_eta0,S_eta0.5,S_eta1"
        sweep_header = result.files["fig2c.csv"].splitlines()[0]
        assert sweep_header.split(",") == [
            "omega_MHz_eta0",
            "S_eta0",
            "omega_MHz_eta0.5",
            "S_eta0.5",
            "omega_MHz_eta1",
            "S_eta1",
        ]

    def test_water_outputs_and_estimate(self):
        result = run_config_text(WATER_SMALL, jobs=1)
        assert set(result.files) == {
            "fig3b.csv",
            "fig3c.csv",
            "eigensystem.csv",
            "estimate.csv",
            "manifest.txt",
        }
        rows = result.files["estimate.csv"].splitlines()
        header = rows[0].split(",")
        values = dict(zip(header, rows[1].split(",")))
        assert float(values["d_hat_nm"]) == pytest.approx(0.15, rel=1e-2)

    def test_polarization_outputs(self):
        result = run_config_text(POLARIZATION_SMALL, jobs=1)
        assert set(result.files) == {"leakage.csv", "manifest.txt"}
        assert "result.max_minus1_population" in result.files["manifest.txt"]
        header = result.files["leakage.csv"].splitlines()[0]
        assert header == "t_us,pop_plus1,pop_0,pop_minus1"
        for line in result.files["manifest.txt"].splitlines():
            if line.startswith("result.max_minus1_population"):
                assert float(line.split("=")[1].strip()) < 1e-3

    def test_bias_comparison_outputs(self):
        result = run_config_text(BIAS_SMALL, jobs=1)
        table = result.files["bias_comparison.csv"].splitlines()
        header = table[0].split(",")
        assert header[0] == "theta_rad"
        assert "E_triplet0_MHz" in header
        assert "zero_triplet0_MHz" in header
        assert len(table) == 1 + 13

    def test_seventeen_digit_round_trip(self):
        result = run_config_text(BORON_SMALL, jobs=1)
        row = result.files["fig2c.csv"].splitlines()[1]
        text_value = row.split(",")[0]
        assert f"{float(text_value):.17g}" == text_value


class TestDeterminism:
    def test_repeat_runs_identical(self):
        first = run_config_text(BORON_SMALL, jobs=1)
        second = run_config_text(BORON_SMALL, jobs=1)
        assert first.files == second.files

    def test_jobs_do_not_change_bytes(self):
        serial = run_config_text(WATER_SMALL, jobs=1)
        parallel = run_config_text(WATER_SMALL, jobs=4)
        assert serial.files == parallel.files


class TestOscillationPeriod:
    def test_pure_cosine(self):
        # cos^2 repeats at half the cosine period: 1/(2*5) here
        times = np.linspace(0.0, 1.0, 2001)
        values = np.cos(2 * np.pi * 5.0 * times) ** 2
        assert oscillation_period(times, values) == pytest.approx(0.1, rel=1e-4)

    def test_too_few_peaks(self):
        times = np.linspace(0.0, 1.0, 101)
        assert np.isnan(oscillation_period(times, np.linspace(0, 1, 101)))


class TestPresetTables:
    def test_descriptions_cover_all_presets(self):
        assert set(PRESET_DESCRIPTIONS) == set(PRESET_DEFAULTS) == set(EMIT_FILES)
