import json
import math
import subprocess
import sys

import numpy as np
import pytest

from qmckit.cli import load_points, main, read_config
from qmckit.integrands import keister_exact


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_points_lattice_listing(tmp_path, capsys):
    h = tmp_path / "h.txt"
    h.write_text("1\n3\n")
    code, out, err = run(capsys, "points", "--family", "lattice", "--d", "2", "--n-end", "8",
                         "--randomize", "none", "--gen-file", str(h))
    assert code == 0 and "origin" in err
    rows = [tuple(map(float, ln.split(","))) for ln in out.splitlines()[1:]]
    assert rows[1] == (0.5, 0.5) and rows[2] == (0.25, 0.75) and rows[6] == (0.375, 0.125)


def test_points_empty_and_capacity(capsys):
    code, out, _ = run(capsys, "points", "--family", "net", "--d", "2", "--n-end", "0")
    assert code == 0 and out == ""
    code, out, err = run(capsys, "points", "--family", "net", "--d", "2", "--n-end", str(2**33))
    assert code == 1 and out == "" and "CapacityError" in err


def test_points_usage_errors(capsys):
    assert run(capsys, "points", "--family", "net", "--d", "2")[0] == 2
    assert run(capsys, "points", "--family", "sobol", "--d", "2", "--n-end", "4")[0] == 2
    assert run(capsys, "points", "--family", "net", "--d", "2", "--n-end", "4", "--randomize", "shift_mod1")[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys)[0] == 2


def test_points_full_precision(tmp_path, capsys):
    path = tmp_path / "p.csv"
    code, _, _ = run(capsys, "points", "--family", "net", "--d", "3", "--n-end", "16", "--seed", "4",
                     "--output", str(path))
    from qmckit.ld_core import DigitalNet

    assert code == 0
    assert np.array_equal(load_points(path), DigitalNet(3, seed=4).gen(0, 16).values)


def test_points_with_transform(tmp_path, capsys):
    cov = tmp_path / "cov.csv"
    cov.write_text("2,0.5\n0.5,1\n")
    code, out, _ = run(capsys, "points", "--family", "net", "--d", "2", "--n-end", "4096", "--seed", "1",
                       "--transform", "gaussian", "--cov-file", str(cov), "--mean", "1,-1")
    x = np.array([[float(v) for v in ln.split(",")] for ln in out.splitlines()[1:]])
    assert code == 0 and np.allclose(x.mean(axis=0), [1, -1], atol=0.01)
    assert np.allclose(np.cov(x, rowvar=False), [[2, 0.5], [0.5, 1]], atol=0.05)


def test_integrate_keister(capsys):
    code, out, _ = run(capsys, "integrate", "keister", "--d", "5", "--criterion", "qmc-rep",
                       "--family", "net", "--abs-tol", "1e-3", "--seed", "3")
    rec = json.loads(out)
    assert code == 0 and abs(rec["estimate"] - keister_exact(5)) <= 1e-3
    assert rec["flags"][0] == "converged" and rec["criterion"] == "qmc-rep"


def test_integrate_asian_deterministic(capsys):
    code, out, _ = run(capsys, "integrate", "asian-call", "--sigma", "0", "--seed", "1")
    rec = json.loads(out)
    assert code == 0 and rec["error_bound"] == 0.0
    times = np.arange(1, 17) / 16
    S = 100 * np.exp(0.05 * times)
    price = ((50 + S[:-1].sum() + S[-1] / 2) / 16 - 100) * math.exp(-0.05)
    assert rec["estimate"] == pytest.approx(price, abs=1e-12)


def test_integrate_exit_codes(capsys):
    assert run(capsys, "integrate", "keister", "--criterion", "qmc-net", "--family", "lattice")[0] == 2
    assert run(capsys, "integrate", "rosenbrock")[0] == 2
    code, out, _ = run(capsys, "integrate", "keister", "--criterion", "mc-clt", "--abs-tol", "1e-4",
                       "--n-max", "20000", "--seed", "1")
    assert code == 3 and json.loads(out)["flags"][0] == "budget_exhausted"


def test_integrate_deterministic_bytes(capsys):
    argv = ["integrate", "keister", "--d", "3", "--criterion", "qmc-lattice", "--abs-tol", "1e-4", "--seed", "8",
            "--no-timing"]
    a = run(capsys, *argv)[1]
    b = run(capsys, *argv)[1]
    assert a == b and json.loads(a)["time_sec"] == 0


def test_compare_csv_and_svg(tmp_path, capsys):
    svg = tmp_path / "c.svg"
    code, out, _ = run(capsys, "compare", "keister", "--d", "3", "--tolerances", "1e-1,1e-2",
                       "--methods", "mc-clt,qmc-lattice", "--seed", "2", "--svg", str(svg), "--jobs", "2")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "tolerance,method,n,time_sec,estimate,abs_error_vs_oracle"
    assert [ln.split(",")[1] for ln in lines[1:]] == ["mc-clt", "qmc-lattice"] * 2
    rows = [ln.split(",") for ln in lines[1:]]
    for r in rows:
        assert abs(float(r[4]) - keister_exact(3)) == pytest.approx(float(r[5]))
    n = {(float(r[0]), r[1]): int(r[2]) for r in rows}
    assert n[(0.01, "mc-clt")] / n[(0.01, "qmc-lattice")] > n[(0.1, "mc-clt")] / n[(0.1, "qmc-lattice")]
    text = svg.read_text()
    assert text.startswith("<svg") and text.count("<polyline") == 4


def test_compare_single_row_and_errors(capsys):
    code, out, _ = run(capsys, "compare", "keister", "--d", "2", "--tolerances", "1e-2", "--methods",
                       "qmc-net", "--seed", "1")
    assert code == 0 and len(out.splitlines()) == 2
    assert run(capsys, "compare", "nope")[0] == 2
    assert run(capsys, "compare", "keister", "--methods", "magic")[0] == 2


def test_compare_jobs_do_not_change_output(capsys):
    base = ["compare", "keister", "--d", "2", "--tolerances", "1e-1,1e-2,1e-3", "--methods", "qmc-net,qmc-rep",
            "--seed", "5", "--no-timing"]
    assert run(capsys, *base)[1] == run(capsys, *base, "--jobs", "3")[1]


def test_discrepancy_generated_and_file(tmp_path, capsys):
    code, out, _ = run(capsys, "discrepancy", "--family", "net", "--d", "2", "--n", "256", "--seed", "1",
                       "--compare-iid", "--seeds", "10")
    rec = json.loads(out)
    assert code == 0 and rec["ld_beats_iid"] is True and rec["stratified"] == [True, True]
    pts = tmp_path / "p.csv"
    run(capsys, "points", "--family", "halton", "--d", "3", "--n-end", "100", "--seed", "2", "--output", str(pts))
    a = json.loads(run(capsys, "discrepancy", "--input", str(pts))[1])
    b = json.loads(run(capsys, "discrepancy", "--family", "halton", "--d", "3", "--n", "100", "--seed", "2")[1])
    assert a["cd"] == b["cd"] and a["stratified"] is None
    mid = tmp_path / "mid.csv"
    mid.write_text("0.5\n")
    rec = json.loads(run(capsys, "discrepancy", "--input", str(mid))[1])
    assert rec["cd"] == pytest.approx(math.sqrt(1 / 12), abs=1e-12)


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text('# sweep settings\ncommand = "points"\n[points]\nfamily = "net"\nd = 2\nn_end = 4\nseed = 7\n')
    command, tokens = read_config(cfg)
    assert command == "points" and tokens[:2] == ["--family", "net"]
    a = run(capsys, "--config", str(cfg))
    b = run(capsys, "points", "--family", "net", "--d", "2", "--n-end", "4", "--seed", "7")
    assert a == b
    # explicit flags override the file
    c = run(capsys, "--config", str(cfg), "points", "--n-end", "2")
    assert len(c[1].splitlines()) == 3


def test_console_script_entry():
    out = subprocess.run([sys.executable, "-m", "qmckit.cli", "points", "--family", "lattice", "--d", "1",
                          "--n-end", "2", "--seed", "1"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("x1\n")


def test_config_names_the_problem(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text('command = "integrate"\nproblem = "keister"\nd = 2\nabs_tol = 1e-2\nseed = 4\nno_timing = true\n')
    a = run(capsys, "--config", str(cfg))
    b = run(capsys, "integrate", "keister", "--d", "2", "--abs-tol", "1e-2", "--seed", "4", "--no-timing")
    assert a == b and a[0] == 0
    # a positional problem on the command line replaces the file's
    rec = json.loads(run(capsys, "--config", str(cfg), "integrate", "asian-call", "--d", "4")[1])
    assert rec["estimate"] > 3.0  # Keister d=2 is about 1.81
    assert run(capsys, "integrate")[0] == 2
