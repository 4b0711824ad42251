import json
import os
import subprocess
import sys

import pytest

from minkembed import cli

TS = "2026-01-01T00:00:00+00:00"


def read(path):
    with open(path) as fh:
        return json.load(fh)


class TestExitCodes:
    def test_missing_file(self, tmp_path, capsys):
        code = cli.run(["embed", "--input", str(tmp_path / "nope.json"),
                        "--params", str(tmp_path / "p.json"), "--outdir", str(tmp_path)])
        assert code == 1
        assert "no such file" in capsys.readouterr().err

    def test_bad_arguments(self, tmp_path):
        assert cli.run(["gen", "--family", "interval", "--size", "0",
                        "--outdir", str(tmp_path)]) == 1
        assert cli.run(["gen", "--family", "not-a-family"]) == 1
        assert cli.run([]) == 1

    def test_no_feasible_tau_diagnostics(self, tmp_path, capsys):
        code = cli.run(["params", "--C", "1.0", "--theta", "0.5", "--delta", "1.0",
                        "--epsilon", "0.51", "--outdir", str(tmp_path)])
        assert code == 2
        diag = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert diag["error"] == "NoFeasibleTau"
        assert 0 < diag["analytic_cap"] < 1e-40

    def test_invalid_space_file(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"dist": [[0, 1, 5], [1, 0, 1], [5, 1, 0]]}))
        assert cli.run(["dims", "--input", str(bad), "--outdir", str(tmp_path)]) == 1


class TestStages:
    def test_pipeline_equals_composition(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        dims = ["--theta", "0.5", "--delta", "1.2"]
        assert cli.run(["pipeline", "--family", "interval", "--size", "6", "--epsilon", "0.75",
                        "--outdir", str(a), "--timestamp", TS] + dims) == 0
        sp = str(b / "space.json")
        steps = [["gen", "--family", "interval", "--size", "6"],
                 ["dims", "--input", sp] + dims,
                 ["params", "--dims", str(b / "dims.json"), "--epsilon", "0.75"] + dims,
                 ["embed", "--input", sp, "--params", str(b / "params.json")],
                 ["verify", "--input", sp, "--embedding", str(b / "embedding.json")]]
        for argv in steps:
            assert cli.run(argv + ["--timestamp", TS, "--outdir", str(b)]) == 0, argv
        for name in ("space.json", "dims.json", "params.json", "nets.json",
                     "embedding.json", "report.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes(), name
        assert read(a / "report.json")["pass"]

    def test_manifest_contents(self, tmp_path):
        assert cli.run(["gen", "--family", "cantor", "--depth", "3", "--timestamp", TS,
                        "--outdir", str(tmp_path)]) == 0
        man = read(tmp_path / "manifest-gen.json")
        assert man["command"] == "gen" and man["timestamp"] == TS
        assert man["outputs"] == ["space.json"]
        assert man["config"]["outdir"] == os.path.abspath(tmp_path)
        assert man["backend"] in ("cython", "python")

    def test_outdir_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv("MINKEMBED_OUTDIR", str(tmp_path))
        assert cli.run(["gen", "--family", "star", "--arms", "3"]) == 0
        assert (tmp_path / "space.json").exists()

    def test_nets_and_vectors(self, tmp_path):
        assert cli.run(["gen", "--family", "gw_tree", "--size", "10", "--seed", "1",
                        "--outdir", str(tmp_path)]) == 0
        sp = str(tmp_path / "space.json")
        assert cli.run(["params", "--input", sp, "--mode", "practical", "--tau", "0.1",
                        "--colors", "0", "--outdir", str(tmp_path)]) == 0
        pp = str(tmp_path / "params.json")
        assert cli.run(["nets", "--input", sp, "--params", pp, "--outdir", str(tmp_path)]) == 0
        nets = read(tmp_path / "nets.json")
        assert cli.run(["embed", "--input", sp, "--params", pp, "--dump-vectors",
                        "--outdir", str(tmp_path)]) == 0
        assert read(tmp_path / "nets.json") == nets
        assert read(tmp_path / "vectors.json")["maps"]

    def test_snowflake_of_input(self, tmp_path):
        assert cli.run(["gen", "--family", "interval", "--size", "4",
                        "--outdir", str(tmp_path / "base")]) == 0
        assert cli.run(["gen", "--family", "snowflake_of", "--alpha", "0.5",
                        "--input", str(tmp_path / "base" / "space.json"),
                        "--outdir", str(tmp_path)]) == 0
        assert read(tmp_path / "space.json")


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "minkembed.cli", "gen", "--family", "interval",
                          "--size", "3", "--outdir", str(tmp_path)], capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
    assert (tmp_path / "space.json").exists()
