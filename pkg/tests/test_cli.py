import csv
import json
import re
import subprocess
import sys

import pytest

from starsearch.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def value(out, label):
    m = re.search(label + r" = ([-+0-9.e]+)", out)
    assert m, f"{label!r} not in output"
    return float(m.group(1))


@pytest.fixture(autouse=True)
def out_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("STARSEARCH_OUT", str(tmp_path))
    return tmp_path


def test_walk_grover(capsys, out_dir):
    code, out, _ = run(capsys, "walk", "--phases", "pi:1,0:63")
    assert code == 0
    assert value(out, "peak P") >= 0.9
    rows = list(csv.reader(open(out_dir / "walk_trace.csv")))
    assert rows[0] == ["k", "P_k"]


def test_walk_three_phase(capsys):
    code, out, _ = run(capsys, "walk", "--phases", "2pi/3:50,-2pi/3:50,0:1", "--no-files")
    assert code == 0
    assert value(out, "peak P") == pytest.approx(0.75, abs=0.05)
    assert "tolerances" in out


def test_walk_flat(capsys, out_dir):
    code, out, _ = run(capsys, "walk", "--phases", "0:8", "--per-edge", "--steps", "10")
    assert code == 0
    rows = list(csv.reader(open(out_dir / "walk_trace.csv")))
    assert rows[0] == ["k", "P_edge"]
    assert all(float(r[1]) == pytest.approx(1 / 8) for r in rows[1:])


def test_walk_formats(capsys, out_dir):
    assert run(capsys, "walk", "--phases", "pi:1,0:15", "--format", "json", "--svg")[0] == 0
    data = json.load(open(out_dir / "walk_trace.json"))
    assert data[0]["k"] == 0
    assert (out_dir / "walk_trace.svg").read_text().startswith("<svg")
    assert run(capsys, "walk", "--phases", "pi:1,0:15", "--format", "plot-data")[0] == 0
    assert (out_dir / "walk_trace.dat").read_text().startswith("# k P_k")


def test_out_flag_overrides_env(capsys, tmp_path):
    target = tmp_path / "elsewhere"
    assert run(capsys, "walk", "--phases", "pi:1,0:15", "--out", str(target))[0] == 0
    assert (target / "walk_trace.csv").exists()


def test_spectrum_grover(capsys):
    code, out, _ = run(capsys, "spectrum", "--phases", "pi:1,0:99")
    assert code == 0
    assert "0.98+0.198997i" in out.replace("-0.198997i", "+0.198997i")
    assert "multiplicity 98" in out
    assert "lambda = +/-(0+1i)" in out


def test_spectrum_three_phase(capsys):
    code, out, _ = run(capsys, "spectrum", "--phases", "2pi/3:50,-2pi/3:50,0:1", "--precision", "10")
    assert code == 0
    N = 101
    re_part = -1 + 3 / (2 * N)
    assert f"{re_part:.10g}" in out
    assert "z = 1+0i" in out or "z = 1-0i" in out


def test_spectrum_dense_check(capsys):
    code, out, _ = run(capsys, "spectrum", "--phases", "2pi/3:7,-2pi/3:8,0:1", "--dense-check")
    assert code == 0
    assert value(out, "max eigenvalue mismatch") <= 1e-8


def test_grover_d3(capsys):
    code, out, _ = run(capsys, "grover", "-N", "243", "-d", "3", "--even", "--seed", "1")
    assert code == 0
    assert value(out, "P_max") == pytest.approx(0.75, abs=0.05)
    assert abs(value(out, "at k_max") - 14) <= 2


def test_grover_sign_flip(capsys):
    code, out, _ = run(capsys, "grover", "-N", "256", "-d", "4", "--mode", "sign-flip")
    assert code == 0
    assert value(out, "P_max") >= 0.95
    assert value(out, "queries/iteration") == 4


def test_grover_four(capsys, out_dir):
    code, out, _ = run(capsys, "grover", "-N", "4", "-d", "2")
    assert code == 0
    rows = list(csv.reader(open(out_dir / "grover_trace.csv")))
    assert float(rows[2][1]) == pytest.approx(1, abs=1e-15)
    assert value(out, "at k_max") == 1


def test_predict(capsys):
    code, out, _ = run(capsys, "predict", "-N", "243", "-d", "3", "-M", "1")
    assert code == 0
    assert "0.75" in out
    assert value(out, "k_max_pred") == pytest.approx(14.1372, abs=1e-4)
    code, out, _ = run(capsys, "predict", "-N", "100", "-d", "2")
    assert value(out, "P_max_pred = 3/\\(d\\+1\\)") == 1


def test_sweep(capsys, out_dir):
    code, out, _ = run(capsys, "sweep", "--N", "81,243,729", "--d", "3")
    assert code == 0
    rows = list(csv.reader(open(out_dir / "sweep.csv")))
    assert len(rows) == 4
    m = re.search(r"a = ([-0-9.e]+)", out)
    assert float(m.group(1)) == pytest.approx(0.5, abs=0.05)


def test_sweep_reproducible(capsys, tmp_path):
    args = ["sweep", "--N", "81,243", "--d", "2,3", "--M", "1,2", "--dist", "random", "--seed", "5"]
    run(capsys, *args, "--out", str(tmp_path / "a"))
    run(capsys, *args, "--out", str(tmp_path / "b"), "--workers", "3")
    assert (tmp_path / "a" / "sweep.csv").read_bytes() == (tmp_path / "b" / "sweep.csv").read_bytes()


@pytest.mark.parametrize(
    "argv",
    [
        ["walk", "--phases", "banana"],
        ["walk", "--phases", "pi:1,0:3", "--target", "5"],
        ["walk", "--phases", "pi:1,pi:3"],
        ["grover", "-N", "10", "-d", "0"],
        ["grover", "-N", "2187", "-d", "3", "-M", "4", "--even"],
        ["predict", "-N", "10"],
        ["sweep", "--N", "a,b", "--d", "3"],
        ["frobnicate"],
        ["walk", "--phases", "pi:1,0:3", "--unknown-flag"],
    ],
)
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_numerical_failure(capsys):
    # the dense check refuses matrices above its size cap
    assert run(capsys, "spectrum", "--phases", "pi:1,0:3000", "--dense-check")[0] == 3


def test_strict_refuses(capsys):
    assert run(capsys, "grover", "-N", "8", "-d", "9", "--strict")[0] == 4
    assert run(capsys, "predict", "-N", "20", "-d", "3", "-M", "5", "--strict")[0] == 4
    assert run(capsys, "sweep", "--N", "8", "--d", "9", "--strict")[0] == 4
    code, out, _ = run(capsys, "grover", "-N", "8", "-d", "9", "--dist", "random")
    assert code == 0 and "warning" in out


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "starsearch", "predict", "-N", "243", "-d", "3", "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "k_max_pred" in proc.stdout
