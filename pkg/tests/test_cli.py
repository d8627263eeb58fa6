from __future__ import annotations

import json
import subprocess
import sys

import jsonschema
import pytest

from rootsum.cli import main
from rootsum.schemas import SCHEMAS


@pytest.fixture(autouse=True)
def cache_env(tmp_path, monkeypatch):
    monkeypatch.setenv("ROOTSUM_CACHE_DIR", str(tmp_path / "cache"))
    return tmp_path / "cache"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def validated(out: str) -> dict:
    doc = json.loads(out)
    name = doc["schema"].split("/")[1]
    jsonschema.validate(doc, SCHEMAS[name])
    return doc


class TestCommands:
    def test_basis_info(self, capsys):
        code, out, _ = run(capsys, "basis-info", "--tau", "2")
        assert code == 0 and validated(out)["products"] == [1, 2, 3, 6]

    def test_pigeonhole(self, capsys):
        code, out, _ = run(capsys, "pigeonhole", "--tau", "1", "--n", "5")
        doc = validated(out)
        assert code == 0 and doc["certified"] is True and doc["w"]["coeffs"] == {"2": "5"}

    def test_min_gap(self, capsys):
        code, out, _ = run(capsys, "min-gap", "--tau", "1", "--n", "50")
        assert code == 0 and validated(out)["w"]["coeffs"] == {"2": "29"}

    def test_approx(self, capsys):
        code, out, _ = run(capsys, "approx", "--k", "3", "--alpha", "0.5", "--n", "1000")
        doc = validated(out)
        assert code == 0 and len(doc["b"]) == 3 and all(1 <= b <= 1000 for b in doc["b"])
        assert "greedy" in doc

    def test_scan_csv_and_json(self, capsys):
        code, out, _ = run(capsys, "scan", "--mode", "t2", "--k", "1", "--alpha", "pi", "--n-list", "64,256,1024")
        assert code == 0 and out.splitlines()[0] == "n,err_lo,err_hi,bound,slope_window"
        code, out, _ = run(capsys, "scan", "--mode", "t1", "--k", "2", "--n-list", "50,100,200", "--format", "json")
        assert code == 0 and validated(out)["mode"] == "theorem1"

    def test_theorem1(self, capsys):
        code, out, _ = run(capsys, "theorem1", "--k", "2")
        doc = validated(out)
        assert code == 0 and doc["pair"]["checks"]["ok"] is True and len(doc["a"]) == 2

    def test_theorem1_verify(self, capsys):
        code, out, _ = run(capsys, "theorem1-verify", "--k", "1", "--n-list", "10,100")
        lines = out.splitlines()
        assert code == 0 and lines[0] == "n,err_lo,err_hi,n^k_times_err" and len(lines) == 3

    def test_series_probe(self, capsys):
        code, out, _ = run(capsys, "series", "--probe")
        doc = validated(out)
        assert code == 0 and doc["C"][:5] == ["1", "1/2", "-1/8", "1/16", "-5/128"]
        assert doc["K"]["2"] == ["1", "-1", "1", "-1", "1"]

    def test_ladder_uses_cache(self, capsys, cache_env):
        code, out, _ = run(capsys, "ladder", "--tau", "1", "--levels", "3")
        assert code == 0 and len(out.splitlines()) == 3
        for line in out.splitlines():
            jsonschema.validate(json.loads(line), SCHEMAS["ladder-entry"])
        assert (cache_env / "ladder_tau1_cap8000000.jsonl").read_text() == out

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "r.json"
        code, out, _ = run(capsys, "basis-info", "--tau", "1", "--out", str(target))
        assert code == 0 and out == "" and json.loads(target.read_text())["tau"] == 1


class TestExitCodes:
    def test_usage_bad_flag(self, capsys):
        code, _, err = run(capsys, "approx", "--k", "x")
        assert code == 64 and "usage" in err

    def test_usage_domain(self, capsys):
        code, _, err = run(capsys, "approx", "--k", "3", "--alpha", "0.5", "--n", "10")
        assert code == 64 and "threshold" in err

    def test_usage_missing_command(self, capsys):
        assert run(capsys)[0] == 64

    def test_capacity(self, capsys):
        code, _, err = run(capsys, "pigeonhole", "--tau", "3", "--n", "10", "--enum-cap", "1000")
        assert code == 2 and "cap" in err

    def test_budget(self, capsys):
        # certifying the minimum to 2^-160 needs more than a 64-bit budget
        code, _, _ = run(capsys, "min-gap", "--tau", "1", "--n", "50", "--bits", "64")
        assert code == 3

    def test_help(self, capsys):
        assert run(capsys, "--help")[0] == 0


class TestDeterminism:
    @pytest.mark.parametrize(
        "argv",
        [
            ["pigeonhole", "--tau", "2", "--n", "20"],
            ["min-gap", "--tau", "2", "--n", "8"],
            ["scan", "--mode", "t2", "--k", "3", "--alpha", "pi", "--n-list", "100,1000,10000"],
        ],
    )
    def test_jobs(self, capsys, argv):
        _, a, _ = run(capsys, *argv, "--jobs", "1")
        _, b, _ = run(capsys, *argv, "--jobs", "8")
        _, c, _ = run(capsys, *argv, "--jobs", "1")
        assert a == b == c

    def test_console_script(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "rootsum.cli", "basis-info", "--tau", "3"],
            capture_output=True, text=True, check=False,
        )
        assert proc.returncode == 0 and json.loads(proc.stdout)["products"] == [1, 2, 3, 5, 6, 10, 15, 30]
