import json
import shutil
import subprocess

import numpy as np
import pytest

from mvlb.cli import _experiment_config, build_parser, main
from mvlb.dichotomy import read_matrix
from mvlb.experiments import PlanEntry, append_record
from mvlb.io import save_pair, save_state

import heavy
from test_io_report import record


def test_help_exits_cleanly(capsys):
    assert main(["--help"]) == 0
    assert "lsweep" in capsys.readouterr().out


def test_console_script_installed():
    exe = shutil.which("mvlb")
    assert exe is not None
    assert subprocess.run([exe, "report", "--help"], capture_output=True).returncode == 0


class TestExitCodes:
    def test_unknown_command(self):
        assert main(["frobnicate"]) == 2

    def test_case2_without_damping(self, tmp_path):
        assert main(["--out", str(tmp_path), "scaling", "case2", "--plan", "1:8", "--mu", "0"]) == 2

    def test_bad_override(self, tmp_path):
        assert main(["--out", str(tmp_path), "lsweep", "--plan", "1:8:256:16", "--set", "nonsense"]) == 2
        assert main(["--out", str(tmp_path), "lsweep", "--plan", "1:8:256:16", "--set", "colour=blue"]) == 2

    def test_bad_workers(self, tmp_path):
        assert main(["--workers", "0", "--out", str(tmp_path), "scaling", "case1", "--plan", "1:8"]) == 2

    def test_overlapping_lattice(self, tmp_path):
        argv = ["--out", str(tmp_path), "multivortex", "build", "--count", "4", "--L", "3", "--n", "64", "--d", "6"]
        assert main(argv) == 2

    def test_missing_files(self, tmp_path):
        assert main(["report", "--records", str(tmp_path / "none.json"), "--format", "csv",
                     "--output", str(tmp_path / "r.csv")]) == 4
        assert main(["--out", str(tmp_path), "scaling", "case1", "--config", str(tmp_path / "none.ini")]) == 4
        assert main(["--out", str(tmp_path), "spectrum", "--state", str(tmp_path / "nowhere")]) == 4

    def test_no_instability(self, tmp_path):
        argv = ["--out", str(tmp_path), "vortex", "find", "--a-lo", "0", "--a-hi", "0.001", "--n", "64", "--d", "8"]
        assert main(argv) == 3


class TestConfigFile:
    def test_ini_and_overrides(self, tmp_path):
        ini = tmp_path / "study.ini"
        ini.write_text("[experiment]\nplan = 1:8, 2:8, 4:8\nmu = 0.5\na = 120\ntol = 1e-9\n")
        args = build_parser().parse_args(["--seed", "5", "--out", str(tmp_path), "scaling", "case2",
                                          "--config", str(ini), "--set", "a=140", "--mu", "1.0"])
        cfg = _experiment_config(args, "ekman-II")
        assert cfg.plan == [PlanEntry(1, 8.0), PlanEntry(2, 8.0), PlanEntry(4, 8.0)]
        assert cfg.a == 140.0 and cfg.mu == 1.0 and cfg.tol == 1e-9 and cfg.seed == 5
        assert cfg.output_dir == str(tmp_path)

    def test_missing_section(self, tmp_path):
        ini = tmp_path / "bad.ini"
        ini.write_text("[other]\nplan = 1:8\n")
        assert main(["--out", str(tmp_path), "scaling", "case1", "--config", str(ini)]) == 2


class TestCommands:
    def test_build_and_spectrum(self, tmp_path):
        state_dir = tmp_path / "state"
        argv = ["--out", str(state_dir), "multivortex", "build", "--count", "1", "--L", "8", "--n", "64",
                "--d", "8", "--a", "5"]
        assert main(argv) == 0
        assert (state_dir / "state_velocity.mvlb").exists() and (state_dir / "state.meta").exists()
        out = tmp_path / "spec"
        assert main(["--out", str(out), "spectrum", "--state", str(state_dir), "--how-many", "1"]) == 0
        rep = json.loads((out / "spectrum.json").read_text())
        assert rep["converged"] and rep["pairs"][0]["re"] == pytest.approx(-0.616851989016822, abs=1e-6)

    def test_dichotomy(self, tmp_path):
        (state, _, _, pair), _ = heavy.small_pair()
        save_state(tmp_path / "s", state)
        save_pair(tmp_path / "p", pair)
        out = tmp_path / "d"
        argv = ["--out", str(out), "dichotomy", "--state", str(tmp_path / "s"), "--pair", str(tmp_path / "p"),
                "--cut", "2.5"]
        assert main(argv) == 0
        M = read_matrix(out / "neutral_block.txt")
        assert M.shape == (1, 1)
        blocks = json.loads((out / "blocks.json").read_text())
        assert blocks["samples"] >= 20

    def test_report_from_jsonl(self, tmp_path):
        for i in range(3):
            append_record(tmp_path / "r.jsonl", record(i))
        for fmt in ("csv", "json", "svg"):
            target = tmp_path / f"out.{fmt}"
            assert main(["report", "--records", str(tmp_path / "r.jsonl"), "--format", fmt,
                         "--output", str(target)]) == 0
            assert target.stat().st_size > 0
        assert len((tmp_path / "out.csv").read_text().splitlines()) == 4
