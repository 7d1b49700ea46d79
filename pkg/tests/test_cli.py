"""Command-line behavior: exit codes, artifacts, preset listing, verify suites."""

import subprocess
import sys

import pytest

from soclearn.cli import main, run_suite
from soclearn.presets import PRESET_NAMES

CONFIG = """
[signal]
family = bounded_mixture
lambda = 0.5

[observation]
scheme = complete

[strategy]
profile = truth_seeking

[simulation]
sizes = 1:1.0
horizon = 12
replications = 200
"""


class TestRunCommand:
    def test_preset_run_writes_artifacts(self, tmp_path, capsys):
        code = main([
            "run", "thm1_bounded", "--out-dir", str(tmp_path),
            "--replications-override", "50", "--horizon-override", "12", "--seed", "5",
        ])
        assert code == 0
        out = capsys.readouterr().out
        assert "curve.csv (12 rows, 10 columns)" in out
        lines = (tmp_path / "curve.csv").read_text().strip().split("\n")
        assert len(lines) == 13
        meta = (tmp_path / "meta.txt").read_text()
        assert "preset = thm1_bounded\n" in meta
        assert "seed = 5\n" in meta
        assert "replications = 50\n" in meta

    def test_config_file_run(self, tmp_path, capsys):
        path = tmp_path / "tiny.ini"
        path.write_text(CONFIG)
        assert main(["run", str(path), "--out-dir", str(tmp_path / "out")]) == 0
        capsys.readouterr()
        meta = (tmp_path / "out" / "meta.txt").read_text()
        assert "label = tiny\n" in meta

    def test_unknown_target_exits_one(self, tmp_path, capsys):
        assert main(["run", "thm9_missing", "--out-dir", str(tmp_path)]) == 1
        err = capsys.readouterr().err
        assert "neither a readable config file nor a preset name" in err

    def test_parse_error_exits_one(self, tmp_path, capsys):
        path = tmp_path / "bad.ini"
        path.write_text(CONFIG + "frobnicate = 1\n")
        assert main(["run", str(path), "--out-dir", str(tmp_path)]) == 1
        assert "'frobnicate'" in capsys.readouterr().err

    def test_semantic_error_exits_two(self, tmp_path, capsys):
        path = tmp_path / "flat.ini"
        path.write_text(
            CONFIG.replace("profile = truth_seeking",
                           "profile = cutoff_coordination\nepsilon = 0.2")
            .replace("sizes = 1:1.0", "sizes = 5:1.0")
            + "\n[payoff]\nkind = linear\nconformity_step = 0.0\n"
        )
        assert main(["run", str(path), "--out-dir", str(tmp_path)]) == 2
        assert "assumption 3" in capsys.readouterr().err

    def test_bad_override_exits_two(self, tmp_path, capsys):
        assert main([
            "run", "thm1_bounded", "--out-dir", str(tmp_path),
            "--replications-override", "0",
        ]) == 2
        assert "replications" in capsys.readouterr().err

    def test_thread_count_does_not_change_artifacts(self, tmp_path, capsys):
        # enough replications for two blocks, so the pool path runs
        args = ["run", "thm1_bounded", "--replications-override", "4600",
                "--horizon-override", "15"]
        assert main(args + ["--out-dir", str(tmp_path / "a"), "--threads", "1"]) == 0
        assert main(args + ["--out-dir", str(tmp_path / "b"), "--threads", "2"]) == 0
        capsys.readouterr()
        assert (tmp_path / "a" / "curve.csv").read_bytes() == (
            tmp_path / "b" / "curve.csv"
        ).read_bytes()

    def test_seed_changes_artifacts(self, tmp_path, capsys):
        args = ["run", "thm1_bounded", "--replications-override", "200",
                "--horizon-override", "15"]
        assert main(args + ["--out-dir", str(tmp_path / "a"), "--seed", "1"]) == 0
        assert main(args + ["--out-dir", str(tmp_path / "b"), "--seed", "2"]) == 0
        capsys.readouterr()
        assert (tmp_path / "a" / "curve.csv").read_text() != (
            tmp_path / "b" / "curve.csv"
        ).read_text()


class TestListPresets:
    def test_table_lists_every_preset(self, capsys):
        assert main(["list-presets"]) == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert lines[0].startswith("preset")
        assert "description" in lines[0]
        names = [line.split()[0] for line in lines[1:]]
        assert names == list(PRESET_NAMES)
        assert len(names) == 9


class TestVerifyCommand:
    @pytest.mark.parametrize("suite", ["payoff", "risk", "separation", "delegate", "beliefs"])
    def test_each_suite_passes(self, suite, capsys):
        assert main(["verify", "--suite", suite]) == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out
        assert out.count("ok ") >= 1

    def test_unknown_suite_rejected_by_parser(self, capsys):
        with pytest.raises(SystemExit):
            main(["verify", "--suite", "frobnicate"])
        capsys.readouterr()

    def test_run_suite_unknown_name(self):
        with pytest.raises(KeyError, match="unknown suite"):
            run_suite("frobnicate")


class TestEntryPoint:
    def test_module_invocation(self):
        proc = subprocess.run(
            [sys.executable, "-m", "soclearn.cli", "list-presets"],
            capture_output=True, text=True, check=False,
        )
        assert proc.returncode == 0
        assert "thm1_bounded" in proc.stdout
