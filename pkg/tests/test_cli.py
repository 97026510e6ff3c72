import pytest

import nvzfs.cli as cli
from nvzfs.errors import NumericalInvariantError

BORON_SMALL = """
preset = boron_nqr
boron.eta = 0
sweep.points = 21
trace.samples = 21
emit = sweep,estimate
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "experiment.cfg"
    path.write_text(BORON_SMALL, encoding="utf-8")
    return path


class TestPresetsCommand:
    def test_exit_code_and_listing(self, capsys):
        assert cli.main(["presets"]) == 0
        out = capsys.readouterr().out
        assert "boron_nqr" in out
        assert "water_pair" in out


class TestValidateCommand:
    def test_ok_config(self, config_file, capsys):
        assert cli.main(["validate", str(config_file)]) == 0
        out = capsys.readouterr().out
        assert "boron.qbar = 2.9921  [default]" in out

    def test_error_config_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text("preset = water_pair\nwater.d = -1\n", encoding="utf-8")
        assert cli.main(["validate", str(bad)]) == 2
        assert "ERROR" in capsys.readouterr().out

    def test_missing_file_exits_2(self):
        assert cli.main(["validate", "/nonexistent/file.cfg"]) == 2

    def test_unreachable_server_exits_1(self, capsys):
        rc = cli.main(["presets", "--server", "http://127.0.0.1:1"])
        assert rc == 1
        assert "unreachable" in capsys.readouterr().err


class TestRunCommand:
    def test_writes_outputs(self, config_file, tmp_path):
        out_dir = tmp_path / "results"
        assert cli.main(["run", str(config_file), "--out", str(out_dir)]) == 0
        assert sorted(p.name for p in out_dir.iterdir()) == [
            "estimate.csv",
            "fig2c.csv",
            "manifest.txt",
        ]

    def test_bad_config_exits_2_and_writes_nothing(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text("preset = boron_nqr\nboron.qbar = -3\n", encoding="utf-8")
        out_dir = tmp_path / "results"
        assert cli.main(["run", str(bad), "--out", str(out_dir)]) == 2
        assert not out_dir.exists()
        assert "boron.qbar" in capsys.readouterr().err

    def test_numerical_error_exits_3(self, config_file, tmp_path, monkeypatch):
        import nvzfs.service.app as service_app

        def boom(text, jobs=None):
            raise NumericalInvariantError("trace drifted")

        monkeypatch.setattr(service_app, "run_config_text", boom)
        # rebuild the app so the patched engine is wired in
        monkeypatch.setattr(service_app, "app", service_app.create_app())
        rc = cli.main(["run", str(config_file), "--out", str(tmp_path / "x")])
        assert rc == 3

    def test_byte_identical_outputs_across_jobs(self, config_file, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert cli.main(["run", str(config_file), "--out", str(out1), "--jobs", "1"]) == 0
        assert cli.main(["run", str(config_file), "--out", str(out2), "--jobs", "4"]) == 0
        for name in ("fig2c.csv", "estimate.csv", "manifest.txt"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_out_dir_from_config(self, tmp_path, monkeypatch):
        config = tmp_path / "cfg.cfg"
        config.write_text(
            BORON_SMALL + f"out = {tmp_path / 'from_config'}\n", encoding="utf-8"
        )
        monkeypatch.chdir(tmp_path)
        assert cli.main(["run", str(config)]) == 0
        assert (tmp_path / "from_config" / "fig2c.csv").exists()
