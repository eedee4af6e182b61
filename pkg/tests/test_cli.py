import csv
import shutil
import subprocess
import sys

import pytest

from sawtorus.cli import main


def run(tmp_path, *args):
    return main([*args, "--output-dir", str(tmp_path)])


def read_rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_evolve_prints_forward_image(tmp_path, capsys):
    assert run(tmp_path, "evolve", "--alpha", "1/2", "--x", "0.5,0.25", "--steps", "1") == 0
    assert capsys.readouterr().out.strip() == "0 0.5"
    rows = read_rows(tmp_path / "orbit.csv")
    assert [r["step"] for r in rows] == ["0", "1"]


def test_evolve_backwards(tmp_path, capsys):
    assert run(tmp_path, "evolve", "--alpha", "1/2", "--x", "0,0.5", "--steps", "-1") == 0
    assert capsys.readouterr().out.strip() == "0.5 0.25"


def test_breaking_time_writes_eighteen_rows(tmp_path):
    args = ["breaking-time", "--alpha", "3/2", "--N", "64,256", "--jmax", "8", "--field", "sin2d"]
    assert run(tmp_path, *args) == 0
    rows = read_rows(tmp_path / "breaking_time.csv")
    assert len(rows) == 18
    assert list(rows[0]) == ["alpha", "N", "j", "e_norm", "budget", "threshold", "jstar"]
    manifest = (tmp_path / "manifest.txt").read_text()
    for key in ("alpha = 3/2", "jmax = 8", "quad_M = 2", "seed = 0", "threshold = 0.5", "version = "):
        assert key in manifest


def test_localize_below_threshold_exits_3(tmp_path, capsys):
    assert run(tmp_path, "localize", "--alpha", "1/2", "--N", "8", "--n", "3", "--d0", "0.1") == 3
    assert "precondition" in capsys.readouterr().err


def test_flag_errors_exit_2(tmp_path, capsys):
    assert run(tmp_path, "evolve", "--alpha", "1/2") == 2
    assert "--x" in capsys.readouterr().err
    assert run(tmp_path, "localize", "--alpha", "one half", "--N", "8", "--n", "1") == 2
    assert run(tmp_path, "nonsense", "--alpha", "1/2") == 2
    assert main(["breaking-time", "--alpha", "3/2", "--N", "16", "--gamma", "2",
                 "--output-dir", str(tmp_path)]) == 2


def test_internal_failure_exits_4(tmp_path, monkeypatch):
    import sawtorus.lattice as lat

    monkeypatch.setattr(lat, "_forward_table", lambda a, N: lat.np.zeros(N * N, dtype=lat.np.int64))
    assert run(tmp_path, "discretize", "--alpha", "1/2", "--N", "4") == 4


def test_depth_exceeded_exits_3(tmp_path):
    assert run(tmp_path, "geometry", "--alpha", "1/2", "--p", "9", "--samples", "1000", "--n-max", "1") == 3


def test_decimal_alpha_warns(tmp_path, capsys):
    assert run(tmp_path, "evolve", "--alpha", "0.25", "--x", "0.5,0.25") == 0
    assert "warning" in capsys.readouterr().err


def test_determinism(tmp_path):
    outputs = []
    for k in range(2):
        d = tmp_path / str(k)
        assert run(d, "localize", "--alpha", "1/2", "--N", "64", "--n", "1", "--x-samples", "300",
                   "--y-samples", "200", "--seed", "4") == 0
        assert run(d, "compare", "--alpha", "3/2", "--N", "24", "--j", "2") == 0
        assert run(d, "stretch", "--alpha", "3/2", "--n-max", "4") == 0
        outputs.append({p.name: p.read_bytes() for p in d.iterdir() if p.name != "manifest.txt"})
    assert outputs[0] == outputs[1]
    assert set(outputs[0]) >= {"localization.csv", "koopman.pgm", "sandwich.pgm", "difference.pgm",
                               "difference.range.txt", "compare.csv", "stretch.csv"}


def test_geometry_outputs(tmp_path):
    args = ["geometry", "--alpha", "3/2", "--p", "0,1,-1", "--n-max", "2", "--N", "64", "--samples", "20000"]
    assert run(tmp_path, *args) == 0
    curves = read_rows(tmp_path / "curves.csv")
    assert {r["p"] for r in curves} == {"0", "1", "-1"}
    measures = read_rows(tmp_path / "measures.csv")
    assert list(measures[0]) == ["set", "n", "eps", "N", "mean", "stderr", "bound"]
    assert {r["set"] for r in measures} == {"strip", "big_gamma"}  # N = 64 is below N~ for every n here
    for r in measures:
        assert float(r["mean"]) <= float(r["bound"]) + 3 * float(r["stderr"])


def test_track_and_discretize(tmp_path):
    assert run(tmp_path, "track", "--alpha", "1/2", "--N", "512", "--n", "2", "--samples", "500") == 0
    row = read_rows(tmp_path / "tracking.csv")[0]
    assert row["violations"] == "0" and float(row["max_ratio"]) <= 1
    assert run(tmp_path, "discretize", "--alpha", "3/2", "--N", "4", "--field", "sin_x1") == 0
    assert len(read_rows(tmp_path / "diagonal.csv")) == 16
    assert len(read_rows(tmp_path / "permutation.csv")) == 16


@pytest.mark.skipif(shutil.which("sawtorus") is None, reason="console script not installed")
def test_console_script(tmp_path):
    res = subprocess.run(["sawtorus", "evolve", "--alpha", "1/2", "--x", "0.5,0.25", "--output-dir", str(tmp_path)],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "0 0.5"
    res = subprocess.run([sys.executable, "-m", "sawtorus.cli", "localize", "--alpha", "1/2", "--N", "8",
                          "--n", "3", "--output-dir", str(tmp_path)], capture_output=True, text=True)
    assert res.returncode == 3
