"""CLI tests driven through main(argv): exit codes, config-file merging,
and output files."""

import csv
import json

import pytest

from qknn.cli import build_parser, main

from conftest import DATA_DIR


def run_cli(*argv):
    return main(list(argv))


class TestParser:
    def test_subcommands_exist(self):
        parser = build_parser()
        for argv in (
            ["run", "--dataset", "iris"],
            ["sweep", "--p-start", "0.0"],
            ["compare", "--k", "3"],
            ["select", "--bins", "8"],
        ):
            args = parser.parse_args(argv)
            assert args.command == argv[0]

    def test_missing_subcommand_exits_two(self, capsys):
        with pytest.raises(SystemExit) as exc:
            build_parser().parse_args([])
        assert exc.value.code == 2
        capsys.readouterr()

    def test_bad_choice_exits_two(self, capsys):
        with pytest.raises(SystemExit) as exc:
            build_parser().parse_args(["run", "--model", "svm"])
        assert exc.value.code == 2
        capsys.readouterr()


class TestRun:
    def test_writes_json_report(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = run_cli(
            "run",
            "--dataset", "iris",
            "--model", "cknn",
            "--k", "3",
            "--seed", "21",
            "--features", "4",
            "--data-dir", str(DATA_DIR),
            "--out", str(out),
        )
        assert code == 0
        report = json.loads(out.read_text())
        assert report["config"]["model"] == "cknn"
        assert report["config"]["seed"] == 21
        assert "accuracy=" in capsys.readouterr().out

    def test_full_flag_set_accepted(self, tmp_path, capsys):
        out = tmp_path / "r.json"
        code = run_cli(
            "run",
            "--dataset", "iris",
            "--model", "qknn",
            "--k", "3",
            "--seed", "7",
            "--features", "2",
            "--angle-scale", "3.14159",
            "--distance", "sampled",
            "--shots", "64",
            "--data-dir", str(DATA_DIR),
            "--out", str(out),
        )
        assert code == 0
        report = json.loads(out.read_text())
        assert report["config"]["distance"] == "sampled"
        assert report["config"]["shots"] == 64
        capsys.readouterr()

    def test_missing_out_is_an_argument_error(self, capsys):
        code = run_cli("run", "--dataset", "iris", "--data-dir", str(DATA_DIR))
        assert code == 2
        assert "argument error" in capsys.readouterr().err

    def test_missing_data_file_exits_one(self, tmp_path, capsys):
        code = run_cli(
            "run",
            "--dataset", "iris",
            "--data-dir", str(tmp_path),
            "--out", str(tmp_path / "r.json"),
        )
        assert code == 1
        assert "stage 'load'" in capsys.readouterr().err


class TestConfigFile:
    def test_flags_override_file(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "dataset": "iris",
            "model": "cknn",
            "k": 1,
            "data_dir": str(DATA_DIR),
        }))
        out = tmp_path / "r.json"
        code = run_cli("run", "--config", str(cfg), "--k", "5", "--out", str(out))
        assert code == 0
        report = json.loads(out.read_text())
        assert report["config"]["k"] == 5  # flag beat the file
        assert report["config"]["model"] == "cknn"  # file beat the default
        capsys.readouterr()

    def test_out_can_come_from_the_file(self, tmp_path, capsys):
        out = tmp_path / "r.json"
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "dataset": "iris",
            "model": "cknn",
            "data_dir": str(DATA_DIR),
            "out": str(out),
        }))
        assert run_cli("run", "--config", str(cfg)) == 0
        assert out.exists()
        capsys.readouterr()

    def test_unknown_keys_exit_two(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"turbo": True}))
        code = run_cli("run", "--config", str(cfg), "--out", "x.json")
        assert code == 2
        assert "unknown keys" in capsys.readouterr().err

    def test_malformed_json_exits_two(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("{not json")
        code = run_cli("run", "--config", str(cfg), "--out", "x.json")
        assert code == 2
        assert "not valid JSON" in capsys.readouterr().err

    def test_missing_config_file_exits_two(self, tmp_path, capsys):
        code = run_cli(
            "run", "--config", str(tmp_path / "nope.json"), "--out", "x.json"
        )
        assert code == 2
        capsys.readouterr()

    def test_bad_config_value_exits_two(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"dataset": "mnist"}))
        code = run_cli("run", "--config", str(cfg), "--out", "x.json")
        assert code == 2
        capsys.readouterr()

    def test_out_of_domain_flag_value_exits_two(self, tmp_path, capsys):
        # --k 0 parses as an int but can never be valid, so it is an
        # argument error, not a pipeline failure.
        code = run_cli(
            "run", "--dataset", "iris", "--k", "0",
            "--data-dir", str(DATA_DIR), "--out", str(tmp_path / "x.json"),
        )
        err = capsys.readouterr().err
        assert code == 2
        assert "k must be at least 1" in err


class TestSweep:
    def test_tiny_sweep_writes_csv(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        code = run_cli(
            "sweep",
            "--dataset", "iris",
            "--p-start", "0.0",
            "--p-stop", "0.2",
            "--p-step", "0.2",
            "--trials", "2",
            "--mitigate", "none",
            "--seed", "3",
            "--data-dir", str(DATA_DIR),
            "--out", str(out),
        )
        assert code == 0
        with open(out) as fh:
            rows = list(csv.DictReader(fh))
        assert [row["p"] for row in rows] == ["0.0", "0.2"]
        assert all(row["trials"] == "2" for row in rows)
        assert "p=0.00" in capsys.readouterr().out

    def test_bad_noise_range_exits_two(self, capsys):
        code = run_cli(
            "sweep",
            "--dataset", "iris",
            "--p-start", "0.5",
            "--p-stop", "0.1",
            "--data-dir", str(DATA_DIR),
            "--out", "x.csv",
        )
        assert code == 2
        capsys.readouterr()

    def test_repeat_vote_forces_sampled_mode(self, tmp_path, capsys):
        # exact-mode configs must still work: the sweep switches to
        # sampled distances internally when voting is requested
        out = tmp_path / "sweep.csv"
        code = run_cli(
            "sweep",
            "--dataset", "iris",
            "--p-start", "0.1",
            "--p-stop", "0.1",
            "--p-step", "0.1",
            "--trials", "1",
            "--mitigate", "repeat-vote",
            "--shots", "32",
            "--data-dir", str(DATA_DIR),
            "--out", str(out),
        )
        assert code == 0
        with open(out) as fh:
            rows = list(csv.DictReader(fh))
        assert rows[0]["mitigation"] == "repeat-vote"
        capsys.readouterr()


class TestCompare:
    def test_compare_writes_three_rows(self, tmp_path, capsys):
        out = tmp_path / "compare.csv"
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "dataset": "iris",
            "features": 3,
            "qnn_layers": 1,
            "qnn_epochs": 2,
            "data_dir": str(DATA_DIR),
        }))
        code = run_cli("compare", "--config", str(cfg), "--out", str(out))
        assert code == 0
        with open(out) as fh:
            rows = list(csv.DictReader(fh))
        assert [row["model"] for row in rows] == ["qknn", "cknn", "qnn"]
        assert capsys.readouterr().out.count("accuracy=") == 3


class TestSelect:
    def test_prints_ranking(self, capsys):
        code = run_cli(
            "select",
            "--dataset", "iris",
            "--bins", "8",
            "--policy", "topk=2",
            "--data-dir", str(DATA_DIR),
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "policy: topk=2" in out
        assert out.count("[kept]") == 2
        assert out.count("[dropped]") == 2
        assert "petal_length" in out

    def test_alpha_policy(self, capsys):
        code = run_cli(
            "select",
            "--dataset", "iris",
            "--policy", "alpha=0.05",
            "--data-dir", str(DATA_DIR),
        )
        assert code == 0
        assert "policy: alpha=0.05" in capsys.readouterr().out

    def test_bad_policy_exits_two(self, capsys):
        code = run_cli(
            "select", "--dataset", "iris", "--policy", "best=3",
            "--data-dir", str(DATA_DIR),
        )
        assert code == 2
        assert "argument error" in capsys.readouterr().err

    def test_bad_bins_exits_two(self, capsys):
        code = run_cli(
            "select", "--dataset", "iris", "--bins", "1",
            "--data-dir", str(DATA_DIR),
        )
        assert code == 2
        capsys.readouterr()

    def test_missing_data_exits_one(self, tmp_path, capsys):
        code = run_cli("select", "--dataset", "iris", "--data-dir", str(tmp_path))
        assert code == 1
        capsys.readouterr()
