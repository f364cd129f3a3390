import json
import os
import subprocess

import pytest

CLI = os.environ.get("WQMC_CLI")
GOLDEN = os.path.join(os.path.dirname(__file__), "..", "..", "data", "golden.json")

pytestmark = pytest.mark.skipif(not CLI, reason="WQMC_CLI not set")


def run(*args):
    return subprocess.run([CLI, *args], capture_output=True, text=True)


def test_converge_writes_reports(tmp_path):
    r = run("converge", "--problem", "banana", "--qoi", "f1,f3", "--levels", "1", "--golden", GOLDEN,
            "--out-dir", str(tmp_path))
    assert r.returncode == 0, r.stderr
    csv = (tmp_path / "converge_banana_adaptive.csv").read_text().splitlines()
    assert csv[0] == "N,error,evals,method,qoi"
    assert [row.split(",")[-1] for row in csv[1:]] == ["f1", "f3"]


def test_config_file_mirrors_flags(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"problem": "banana", "qoi": ["f2"], "levels": 1, "golden": GOLDEN,
                               "out_dir": str(tmp_path)}))
    r = run("integrate", "--config", str(cfg), "--samples", "1024")
    assert r.returncode == 0, r.stderr
    out = json.loads(r.stdout)
    assert out["samples"] == 1024
    assert set(out["estimates"]) == {"f2"}


def test_config_errors_exit_2(tmp_path):
    assert run("converge", "--method", "sparse").returncode == 2
    assert run("converge", "--no-such-flag").returncode == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"levles": 3}')
    assert run("converge", "--config", str(bad)).returncode == 2
    r = run("converge", "--golden", str(tmp_path / "missing.json"), "--out-dir", str(tmp_path))
    assert r.returncode == 2
    assert "oracle" in r.stderr


def test_numerical_failure_exits_3(tmp_path):
    # Observations far from any trajectory: the posterior underflows to zero
    # on every grid point and the mixture is degenerate.
    data = tmp_path / "far.json"
    r = run("dataset", "--out-dir", str(tmp_path))
    assert r.returncode == 0
    d = json.loads((tmp_path / "dataset.json").read_text())
    d["y"] = [1e6 for _ in d["y"]]
    data.write_text(json.dumps(d))
    r = run("integrate", "--problem", "predprey", "--dataset", str(data), "--samples", "64")
    assert r.returncode == 3, r.stderr
