import json
import shutil
import subprocess

import numpy as np
import pytest

from goursat import cli

SMALL = ["--paths", "300", "--dt", "0.005"]


def run(args, out):
    return cli.main(args + ["--out", str(out)])


def test_verify_kernel(tmp_path):
    assert run(["verify-kernel", "--kernel", "muntz 0,1", "--hardy-functions", "5"], tmp_path) == 0
    summary = (tmp_path / "summary.txt").read_text()
    for ident in ("AC1", "AC2", "AC3", "AC10"):
        assert f"PASS {ident}" in summary
    rows = np.loadtxt(tmp_path / "self_reproduction.csv", delimiter=",", skiprows=1)
    assert rows.shape == (100, 4)


def test_transform_outputs(tmp_path):
    code = run(["transform", "--kernel", "const", "--save-paths", "2"] + SMALL, tmp_path)
    assert code == 0
    m = json.loads((tmp_path / "manifest.json").read_text())
    assert m["config"]["kernel"] == "const" and "threads" not in m["config"]
    assert set(m["files"]) == {"covariance.csv", "independence.csv", "paths/path_0000.csv",
                               "paths/path_0001.csv"}
    assert "near_zero_drift_rms" in m["diagnostics"]
    header = (tmp_path / "paths" / "path_0000.csv").read_text().splitlines()[0]
    assert header == "time,input,output"


def test_csv_full_precision(tmp_path):
    run(["harmonic", "--basis", "const", "--law", "point:0.5", "--t", "0.5"] + SMALL, tmp_path)
    line = (tmp_path / "estimate.csv").read_text().splitlines()[1]
    mantissa = line.split(",")[1].split("e")[0]
    assert len(mantissa.replace("-", "").replace(".", "")) == 17


def test_blob_hash_matches_git(tmp_path):
    run(["bridge", "--basis", "power lambda=0; power lambda=1", "--y", "1,-2"] + SMALL, tmp_path)
    m = json.loads((tmp_path / "manifest.json").read_text())
    if shutil.which("git") is None:
        pytest.skip("git not available")
    got = subprocess.run(["git", "hash-object", str(tmp_path / "endpoint.csv")],
                         capture_output=True, text=True, check=True).stdout.strip()
    assert m["files"]["endpoint.csv"] == got


def test_rerun_is_byte_identical(tmp_path):
    args = ["sde-solve", "--basis", "exp rate=1", "--y-source", "gaussian", "--T", "1",
            "--save-paths", "1"] + SMALL
    run(args + ["--threads", "1", "--batch", "64"], tmp_path / "a")
    run(args + ["--threads", "4", "--batch", "64"], tmp_path / "b")
    for name in ("manifest.json", "recovered.csv", "covariance.csv", "paths/solution_0000.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_config_file_and_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# harmonic check\nbasis = const\nlaw = point:0.5\npaths = 200\n"
                   f"out = {tmp_path / 'from-config'}\nseed = 3\n")
    assert cli.main(["harmonic", "--config", str(cfg), "--seed", "4", "--dt", "0.01"]) == 0
    m = json.loads((tmp_path / "from-config" / "manifest.json").read_text())
    assert m["config"]["seed"] == 4 and m["config"]["paths"] == 200

    monkeypatch.setenv(cli.ENV_OUTPUT, str(tmp_path / "from-env"))
    assert cli.main(["harmonic", "--config", str(cfg), "--dt", "0.01"]) == 0
    assert (tmp_path / "from-env" / "manifest.json").exists()
    assert cli.main(["harmonic", "--config", str(cfg), "--dt", "0.01",
                     "--out", str(tmp_path / "from-flag")]) == 0
    assert (tmp_path / "from-flag" / "manifest.json").exists()


def test_exit_codes(tmp_path):
    assert run(["transform", "--kernel", "bogus"], tmp_path / "a") == cli.EXIT_CONFIG
    assert run(["bridge", "--basis", "const", "--y", "1,2"], tmp_path / "b") == cli.EXIT_CONFIG
    assert run(["harmonic", "--basis", "exp rate=1", "--law", "point:1"],
               tmp_path / "c") == cli.EXIT_CONFIG
    assert run(["report", "--suite", "AC99"], tmp_path / "d") == cli.EXIT_CONFIG
    assert run(["verify-kernel", "--basis", "power lambda=0; power lambda=1e-9"],
               tmp_path / "e") == cli.EXIT_NUMERICAL
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert cli.main(["report", "--config", str(bad)]) == cli.EXIT_CONFIG


def test_failed_check_exits_one(tmp_path, monkeypatch):
    monkeypatch.setattr(cli, "BAND", 1e-9)
    assert run(["harmonic", "--basis", "const", "--law", "point:0.5"] + SMALL,
               tmp_path) == cli.EXIT_CHECK
    assert (tmp_path / "summary.txt").read_text().startswith("FAIL AC11")


def test_law_files(tmp_path):
    cov = tmp_path / "cov.txt"
    cov.write_text("1 0\n0 1\n")
    disc = tmp_path / "disc.csv"
    disc.write_text("1,0.5,0.0\n3,-0.5,0.2\n")
    basis = "power lambda=0; power lambda=1"
    assert run(["harmonic", "--basis", basis, "--law", f"gauss:{cov}", "--t", "0.5"] + SMALL,
               tmp_path / "g") == 0
    assert run(["harmonic", "--basis", basis, "--law", f"discrete:{disc}", "--t", "0.5"] + SMALL,
               tmp_path / "d") == 0
    law = cli.parse_law(f"discrete:{disc}", 2)
    np.testing.assert_allclose(law.weights, [0.25, 0.75])


def test_report(tmp_path):
    assert run(["report", "--suite", "AC1,AC3"], tmp_path) == 0
    lines = (tmp_path / "results.csv").read_text().splitlines()
    assert lines[0] == "criterion,passed,measured,threshold"
    assert [l.split(",")[0] for l in lines[1:]] == ["AC1", "AC3"]
    assert "opposite sign" in (tmp_path / "summary.txt").read_text()


def test_module_entry_point(tmp_path):
    r = subprocess.run(["python3", "-m", "goursat", "verify-kernel", "--kernel", "const",
                        "--hardy-functions", "2", "--out", str(tmp_path)],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "PASS AC2" in r.stdout
