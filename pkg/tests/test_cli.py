"""Command-line interface: configs, outputs, exit codes, determinism."""
import csv
import json

import pytest

from londebye.cli import CliError, load_config_file, main
from londebye.debye_core import DebyeSolution


def run(*argv):
    return main(list(argv))


class TestConfigFile:
    def test_round_trip(self, tmp_path):
        p = tmp_path / "run.cfg"
        p.write_text(
            "# comment line\n"
            "lambda_L = 0.5\n"
            "n_max = 12   # trailing comment\n"
            "n_max_list = 4, 8 16\n"
            "x_o = 0 0 3\n"
        )
        cfg = load_config_file(str(p))
        assert cfg == {
            "lambda_L": 0.5,
            "n_max": 12,
            "n_max_list": [4, 8, 16],
            "x_o": [0.0, 0.0, 3.0],
        }

    def test_unknown_key(self, tmp_path):
        p = tmp_path / "bad.cfg"
        p.write_text("lambda = 1.0\n")
        with pytest.raises(CliError, match="unknown config key"):
            load_config_file(str(p))

    def test_bad_number(self, tmp_path):
        p = tmp_path / "bad.cfg"
        p.write_text("lambda_L = twelve\n")
        with pytest.raises(CliError, match="expected number"):
            load_config_file(str(p))

    def test_missing_file(self):
        with pytest.raises(CliError, match="cannot read config file"):
            load_config_file("/nonexistent/path.cfg")

    @pytest.mark.filterwarnings("ignore:boundary data has")
    def test_cli_overrides_file(self, tmp_path):
        p = tmp_path / "run.cfg"
        p.write_text("lambda_L = 0.5\nn_max = 8\n")
        out = tmp_path / "sol.json"
        assert run(
            "solve", "--config", str(p), "--lambda", "1.0", "--out", str(out)
        ) == 0
        doc = json.loads(out.read_text())
        assert doc["config"]["lambda_L"] == 1.0  # flag wins
        assert doc["config"]["n_max"] == 8      # file value kept


class TestExitCodes:
    def test_invalid_lambda(self, tmp_path):
        assert run("solve", "--lambda", "0", "--out", str(tmp_path / "x.json")) == 1

    def test_unknown_subcommand(self):
        assert run("frobnicate") == 1

    def test_no_subcommand(self):
        assert run() == 1

    def test_source_inside_sphere(self, tmp_path):
        p = tmp_path / "run.cfg"
        p.write_text("x_o = 0 0 0.5\n")
        assert run("solve", "--config", str(p)) == 1


class TestSolve:
    @pytest.mark.filterwarnings("ignore:boundary data has")
    def test_json_round_trip(self, tmp_path):
        out = tmp_path / "sol.json"
        assert run("solve", "--nmax", "10", "--out", str(out)) == 0
        doc = json.loads(out.read_text())
        sol = DebyeSolution.from_json_dict(doc["solution"])
        assert sol.config.n_max == 10
        assert sol.density_norm() > 0
        assert doc["config"]["command"] == "solve"


class TestAccuracy:
    @pytest.mark.filterwarnings("ignore:boundary data has")
    def test_table_and_outputs(self, tmp_path, capsys):
        out = tmp_path / "acc.csv"
        p = tmp_path / "run.cfg"
        p.write_text("n_max_list = 8 16\n")
        assert run("accuracy", "--config", str(p), "--out", str(out)) == 0
        text = capsys.readouterr().out
        assert "eps1" in text and "wall_time_s" in text
        with open(out) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["lambda_L", "n_max", "eps1", "eps2", "M", "wall_time_s"]
        assert len(rows) == 3
        # errors shrink as the truncation degree doubles
        assert float(rows[2][2]) < float(rows[1][2])
        sidecar = json.loads((tmp_path / "acc.csv.config.json").read_text())
        assert sidecar["n_max_list"] == [8, 16]


class TestConditionSweep:
    def test_deterministic_output(self, tmp_path, capsys):
        p = tmp_path / "run.cfg"
        p.write_text("sigma_grid_points = 2\nsigma_grid_extent = 1.0\n")
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        assert run("condition-sweep", "--config", str(p), "--out", str(out1)) == 0
        assert run("condition-sweep", "--config", str(p), "--out", str(out2)) == 0
        capsys.readouterr()
        assert out1.read_bytes() == out2.read_bytes()
        with open(out1) as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 1 + 2 * 2
        assert all(float(r[2]) >= 1.0 for r in rows[1:])


class TestVerify:
    def test_report_passes(self, tmp_path, capsys):
        out = tmp_path / "verify.json"
        assert run("verify", "--nmax", "16", "--out", str(out)) == 0
        text = capsys.readouterr().out
        assert "7/7 checks passed" in text
        doc = json.loads(out.read_text())
        assert all(r["pass"] for r in doc["checks"])

    def test_biot_savart_check_command(self, tmp_path, capsys):
        out = tmp_path / "bs.json"
        assert run("biot-savart-check", "--nmax", "16", "--out", str(out)) == 0
        capsys.readouterr()
        doc = json.loads(out.read_text())
        assert doc["rel_error"] <= 1e-3
        assert min(doc["refinement_ratios"]) >= 4.0
