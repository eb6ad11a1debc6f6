import os

import pytest

from csagg.cli import main
from csagg.config import ExperimentConfig, apply_setting, config_lines, load_config
from csagg.errors import ConfigError


class TestConfig:
    def test_defaults_valid(self):
        cfg = ExperimentConfig()
        cfg.validate()
        assert cfg.peloton.n == 130
        assert cfg.range_m == 50.0

    def test_file_and_overrides(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text("scenario=matrix\nn=20  # comment\nk_measurements=8\n")
        cfg = load_config(str(path), ["seed=5", "loss_p=0.25"])
        assert cfg.scenario == "matrix"
        assert cfg.peloton.n == 20
        assert cfg.k_measurements == 8
        assert cfg.seed == 5 and cfg.peloton.seed == 5
        assert cfg.loss_p == 0.25

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown config key"):
            load_config(None, ["banana=1"])

    def test_bad_value(self):
        with pytest.raises(ConfigError):
            load_config(None, ["n=ten"])

    def test_out_of_range(self):
        with pytest.raises(ConfigError):
            load_config(None, ["loss_p=2.0"])

    def test_speed_profile_parsing(self):
        cfg = load_config(None, ["base_speed_profile=0:10,300:12"])
        assert cfg.peloton.speed_at(0.0) == 10.0
        assert cfg.peloton.speed_at(400.0) == 12.0

    def test_config_lines_round_trip(self, tmp_path):
        cfg = load_config(None, ["scenario=matrix", "n=17", "loss_p=0.75", "seed=3"])
        path = tmp_path / "resolved.cfg"
        path.write_text("\n".join(config_lines(cfg)) + "\n")
        back = load_config(str(path), [])
        assert back == cfg

    def test_scenario_validation(self):
        cfg = apply_setting(ExperimentConfig(), "scenario", "bogus")
        with pytest.raises(ConfigError):
            cfg.validate()


FAST = [
    "--set", "n=12",
    "--set", "duration_s=20",
    "--set", "steps=4",
    "--set", "init_length_m=60",
    "--set", "k_measurements=6",
    "--set", "k_neighbors=4",
]


class TestCli:
    def test_simulate_writes_trace(self, tmp_path, capsys):
        assert main(["simulate", "--out", str(tmp_path)] + FAST) == 0
        trace = (tmp_path / "trace.csv").read_text()
        assert trace.startswith("time_s,rider_id,s_m,d_m")

    def test_matrix_scenario(self, tmp_path):
        assert main(["matrix", "--out", str(tmp_path)] + FAST) == 0
        text = (tmp_path / "report_matrix.csv").read_text()
        assert "# scenario=matrix" in text
        assert "time_s,stress," in text

    def test_routing_scenario(self, tmp_path):
        args = ["routing", "--out", str(tmp_path), "--set", "loss_p=0.3"] + FAST
        assert main(args) == 0
        assert (tmp_path / "report_routing.csv").exists()

    def test_dct_demo(self, tmp_path):
        args = ["dct-demo", "--out", str(tmp_path), "--set", "dct_n=40",
                "--set", "dct_k=20", "--set", "dct_sparsity=4", "--set", "dct_losses=4"]
        assert main(args) == 0
        text = (tmp_path / "report_dct_demo.csv").read_text()
        assert "zero_fill," in text and "column_removal," in text

    def test_seed_changes_report(self, tmp_path):
        main(["matrix", "--out", str(tmp_path / "a"), "--seed", "1"] + FAST)
        main(["matrix", "--out", str(tmp_path / "b"), "--seed", "2"] + FAST)
        a = (tmp_path / "a" / "report_matrix.csv").read_text()
        b = (tmp_path / "b" / "report_matrix.csv").read_text()
        assert a != b

    def test_config_error_exit_code(self, tmp_path, capsys):
        assert main(["matrix", "--set", "loss_p=9"]) == 2
        assert "config error" in capsys.readouterr().err

    def test_missing_config_file(self, capsys):
        assert main(["matrix", "--config", "/nonexistent/x.cfg"]) == 2

    def test_stress_subcommand(self, tmp_path, capsys):
        csv_a = tmp_path / "a.csv"
        csv_b = tmp_path / "b.csv"
        csv_a.write_text("time_s,rider_id,v_mps\n0.000,0,10.0\n0.000,1,10.0\n")
        csv_b.write_text("time_s,rider_id,v_mps\n0.000,0,10.0\n0.000,1,9.0\n")
        assert main(["stress", str(csv_a), str(csv_b)]) == 0
        out = capsys.readouterr().out
        assert "0.000,0.005" in out
        assert "# mean_stress=" in out

    def test_stress_disjoint_times(self, tmp_path, capsys):
        csv_a = tmp_path / "a.csv"
        csv_b = tmp_path / "b.csv"
        csv_a.write_text("time_s,rider_id,v_mps\n0.000,0,10.0\n")
        csv_b.write_text("time_s,rider_id,v_mps\n5.000,0,10.0\n")
        assert main(["stress", str(csv_a), str(csv_b)]) == 2

    def test_trace_ingestion_path(self, tmp_path):
        assert main(["simulate", "--out", str(tmp_path)] + FAST) == 0
        args = ["matrix", "--out", str(tmp_path),
                "--set", f"trace={tmp_path / 'trace.csv'}",
                "--set", "steps=3", "--set", "k_measurements=6", "--set", "k_neighbors=4"]
        assert main(args) == 0
        assert (tmp_path / "report_matrix.csv").exists()
