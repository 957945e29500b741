"""Acceptance suite: one test per criterion, each printing a pass/fail line."""
import math
import subprocess
import sys
import time
import warnings
from fractions import Fraction

import numpy as np

from qmckit.cubature import CubMCCLT, CubQMCLatticeCoeffDecay, CubQMCNetCoeffDecay, CubQMCReplications, integrate
from qmckit.integrands import asian_call_problem, keister_problem
from qmckit.ld_core import (
    DigitalNet, Halton, IIDGenerator, Lattice, LatticeGenVector, UnrandomizedWarning, digitwise_add, lattice_add,
)
from qmckit.measures import (
    KumaraswamyStep, TransformLadder, brownian_covariance, brownian_motion, factorize, gaussian_transform,
    norm_cdf, norm_ppf,
)
from qmckit.quality import centered_l2_discrepancy, convergence_slope

H13 = LatticeGenVector(np.array([1, 3]), m_max=20)


def quiet(gen, a, b):
    """Points without the origin warning that unrandomized blocks raise."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UnrandomizedWarning)
        return gen.gen(a, b).values


def fixed(x, bits):
    """Exact integer image of dyadic points: x * 2^bits."""
    return np.round(np.asarray(x) * 2.0**bits).astype(np.int64)


def test_criterion_01_lattice_listing(report):
    t0 = time.perf_counter()
    x = quiet(Lattice(2, H13, randomize="none"), 0, 8)
    table = []
    for i in range(8):
        phi = Fraction(int(format(i, "03b")[::-1], 2), 8)
        table.append([float((phi * h) % 1) for h in (1, 3)])
    quoted = (tuple(x[1]), tuple(x[2]), tuple(x[4]), tuple(x[6])) == (
        (0.5, 0.5), (0.25, 0.75), (0.125, 0.375), (0.375, 0.125))
    full = np.array_equal(x, np.array(table))
    dt = time.perf_counter() - t0
    ok = quoted and full and dt < 1
    report(1, ok, f"quoted points {quoted}, 8-point table bit-exact {full}, {dt:.3f}s")
    assert ok


def test_criterion_02_digital_net_arithmetic(report):
    t0 = time.perf_counter()
    z = quiet(DigitalNet(2, randomize="none"), 0, 8)
    lat = quiet(Lattice(2, H13, randomize="none"), 0, 8)
    z6 = digitwise_add(z[2], z[4])
    contrast = digitwise_add(lat[2], lat[4])
    ok = (tuple(z[2]) == (0.25, 0.75) and tuple(z[4]) == (0.125, 0.625) and tuple(z[6]) == (0.375, 0.375)
          and tuple(z6) == (0.375, 0.375) and tuple(contrast) == (0.375, 0.625))
    dt = time.perf_counter() - t0
    ok = ok and dt < 1
    pt = lambda v: "(" + ", ".join(f"{float(c):g}" for c in v) + ")"  # noqa: E731
    report(2, ok, f"Z2={pt(z[2])} Z4={pt(z[4])} Z2+Z4={pt(z6)} lattice generators under XOR {pt(contrast)}, "
                  f"{dt:.3f}s")
    assert ok


def _members(codes):
    return {tuple(r) for r in codes}


def test_criterion_03_group_closure(report):
    t0 = time.perf_counter()
    violations = 0
    checks = 0
    for d in range(1, 5):
        lat_all = quiet(Lattice(d, randomize="none"), 0, 256)
        net_all = quiet(DigitalNet(d, randomize="none"), 0, 256)
        for m in range(0, 9):
            n = 2**m
            for pts, op in ((lat_all[:n], lattice_add), (net_all[:n], digitwise_add)):
                members = _members(fixed(pts, 8))
                s = op(pts[:, None, :], pts[None, :, :]).reshape(-1, d)
                violations += sum(tuple(r) not in members for r in fixed(s, 8))
                checks += s.shape[0]
    # randomized cosets: X_i + X_j - X_k stays in the shifted set; exact 53-bit integer arithmetic
    for seed in range(10):
        for m in range(0, 7):
            n = 2**m
            d = 1 + seed % 4
            lat = fixed(Lattice(d, seed=seed).gen(0, n).values, 53)
            net = fixed(DigitalNet(d, seed=seed).gen(0, n).values, 53)
            i, j, k = (a.reshape(-1) for a in np.meshgrid(np.arange(n), np.arange(n), np.arange(n)))
            lsum = (lat[i] + lat[j] - lat[k]) % 2**53
            nsum = net[i] ^ net[j] ^ net[k]
            lm, nm = _members(lat), _members(net)
            violations += sum(tuple(r) not in lm for r in lsum) + sum(tuple(r) not in nm for r in nsum)
            checks += 2 * lsum.shape[0]
    dt = time.perf_counter() - t0
    ok = violations == 0 and dt < 30
    report(3, ok, f"{checks} group sums checked, {violations} violations, {dt:.1f}s")
    assert ok


def test_criterion_04_extensibility(report):
    t0 = time.perf_counter()
    violations = 0
    cases = []
    for label, make in [
        ("lattice/natural", lambda: Lattice(3, randomize="none")),
        ("lattice/natural shifted", lambda: Lattice(3, seed=4)),
        ("net/standard", lambda: DigitalNet(3, randomize="none")),
        ("net/gray", lambda: DigitalNet(3, ordering="gray", randomize="none")),
        ("net/standard lms", lambda: DigitalNet(3, seed=4)),
        ("net/gray lms", lambda: DigitalNet(3, ordering="gray", seed=4)),
        ("halton", lambda: Halton(3, randomize="none")),
        ("halton shifted", lambda: Halton(3, seed=4)),
    ]:
        full = quiet(make(), 0, 2**15)
        for m in range(0, 15):
            prefix = quiet(make(), 0, 2**m)
            violations += not np.array_equal(prefix, full[:2**m])
        cases.append(label)
    dt = time.perf_counter() - t0
    ok = violations == 0 and dt < 10
    report(4, ok, f"{len(cases)} family/ordering cases x m=0..14, {violations} violations, {dt:.1f}s")
    assert ok


def test_criterion_05_keister_accuracy(report):
    t0 = time.perf_counter()
    p = keister_problem(5)
    hits = 0
    for seed in range(100):
        res = integrate(p, DigitalNet(5, seed=seed), CubQMCReplications(), 1e-3)
        hits += abs(res.estimate - p.exact) <= 1e-3
    ns = [integrate(p, DigitalNet(5, seed=1000 + s), CubQMCNetCoeffDecay(), 1e-3).n_total for s in range(20)]
    in_range = all(2**10 <= n <= 2**16 for n in ns)
    dt = time.perf_counter() - t0
    ok = hits >= 95 and in_range and dt < 300
    report(5, ok, f"replications within 1e-3 in {hits}/100 runs; net coefficient-decay n in "
                  f"[2^{math.log2(min(ns)):.0f}, 2^{math.log2(max(ns)):.0f}] over 20 runs; {dt:.0f}s")
    assert ok


def test_criterion_06_tolerance_scaling(report):
    t0 = time.perf_counter()
    p = keister_problem(5)
    eps = [10**-1.5, 10**-2, 10**-2.5]
    n_iid = [integrate(p, IIDGenerator(5, seed=11), CubMCCLT(), e).n_total for e in eps]
    n_lat = [np.exp(np.mean([np.log(integrate(p, Lattice(5, seed=s), CubQMCLatticeCoeffDecay(), e).n_total)
                             for s in range(10)])) for e in eps]
    s_iid = np.polyfit(np.log(eps), np.log(n_iid), 1)[0]
    s_lat = np.polyfit(np.log(eps), np.log(n_lat), 1)[0]
    ratio = n_iid[-1] / n_lat[-1]
    dt = time.perf_counter() - t0
    ok = abs(s_iid + 2) <= 0.4 and -1.5 <= s_lat <= -0.7 and ratio >= 10 and dt < 600
    report(6, ok, f"IID slope {s_iid:.2f}, lattice slope {s_lat:.2f}, n_IID/n_LD at tightest {ratio:.0f}, "
                  f"{dt:.0f}s")
    assert ok


def test_criterion_07_convergence_orders(report):
    t0 = time.perf_counter()
    p = keister_problem(3)
    iid = convergence_slope(p, "iid", range(6, 13), seeds=20)
    net = convergence_slope(p, "net", range(6, 13), seeds=20)
    dt = time.perf_counter() - t0
    ok = -0.65 <= iid.slope <= -0.35 and -1.6 <= net.slope <= -0.8 and dt < 120
    report(7, ok, f"IID RMSE slope {iid.slope:.3f}, scrambled-net slope {net.slope:.3f}, {dt:.1f}s")
    assert ok


def test_criterion_08_brownian_motion(report):
    t0 = time.perf_counter()
    d, tau = 4, 1.0
    x = DigitalNet(d, seed=8).gen(0, 2**16).values
    paths = brownian_motion(tau, d)(x)
    cov_err = np.max(np.abs(np.cov(paths, rowvar=False) - brownian_covariance(tau, d)))
    drifted = brownian_motion(tau, d, drift=2.0)(x)
    mean_err = np.max(np.abs(drifted.mean(axis=0) - 2 * tau / d * np.arange(1, d + 1)))
    dt = time.perf_counter() - t0
    ok = cov_err <= 2e-2 and mean_err <= 2e-2 and dt < 30
    report(8, ok, f"max covariance error {cov_err:.2e}, max drifted-mean error {mean_err:.2e}, {dt:.2f}s")
    assert ok


def test_criterion_09_asian_importance_sampling(report):
    t0 = time.perf_counter()
    det = asian_call_problem(sigma=0.0, d=16)
    res = integrate(det, DigitalNet(16, seed=1), CubQMCReplications(), 1e-2)
    det_err = abs(res.estimate - det.exact)
    eps = 1e-2
    # out-of-the-money strike: the drift moves paths toward the exercise region
    p0 = asian_call_problem(K=130.0, d=16, drift=0.0)
    p2 = asian_call_problem(K=130.0, d=16, drift=2.0)
    faster, worst = 0, 0.0
    for seed in range(100):
        r0 = integrate(p0, DigitalNet(16, seed=seed), CubQMCReplications(), eps)
        r2 = integrate(p2, DigitalNet(16, seed=seed), CubQMCReplications(), eps)
        faster += r2.n_total <= r0.n_total
        worst = max(worst, abs(r0.estimate - r2.estimate))
    dt = time.perf_counter() - t0
    ok = det_err <= 1e-12 and worst <= 2 * eps and faster >= 70 and dt < 300
    report(9, ok, f"sigma=0 error {det_err:.1e}; max |drift0 - drift2| {worst / eps:.2f} eps; drifted n <= "
                  f"undrifted n in {faster}/100; {dt:.0f}s")
    assert ok


def test_criterion_10_importance_sampling_invariance(report):
    t0 = time.perf_counter()
    eps = 1e-4
    ladders = {
        "K": None,
        "K_gauss": TransformLadder([gaussian_transform(np.zeros(1), 0.75 * np.eye(1))]),
        "K_gauss_kuma": TransformLadder([KumaraswamyStep(np.full(1, 0.8), np.full(1, 0.8)),
                                         gaussian_transform(np.zeros(1), 0.75 * np.eye(1))]),
    }
    est = {k: integrate(keister_problem(1, lad), DigitalNet(1, seed=10), CubQMCNetCoeffDecay(), eps).estimate
           for k, lad in ladders.items()}
    vals = list(est.values())
    spread = max(vals) - min(vals)
    dt = time.perf_counter() - t0
    ok = spread <= 2 * eps and dt < 120
    report(10, ok, "estimates " + ", ".join(f"{k}={v:.7f}" for k, v in est.items())
           + f"; spread {spread:.1e} vs 2eps {2 * eps:.0e}; {dt:.2f}s")
    assert ok


def test_criterion_11_measure_machinery(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    worst_w = 0.0
    for d in (1, 2, 4, 8):
        a = rng.standard_normal((d, d))
        ladder = TransformLadder([gaussian_transform(rng.standard_normal(d), a @ a.T + np.eye(d))])
        _, w = ladder.apply(DigitalNet(d, seed=d).gen(0, 1024).values)
        worst_w = max(worst_w, float(np.max(np.abs(w - 1))))
    _, w = TransformLadder([brownian_motion(1.0, 8)]).apply(DigitalNet(8, seed=3).gen(0, 1024).values)
    worst_w = max(worst_w, float(np.max(np.abs(w - 1))))
    u = np.linspace(0, 1, 10_002)[1:-1]
    rt = float(np.max(np.abs(norm_cdf(norm_ppf(u)) - u)))
    worst_f = 0.0
    for _ in range(100):
        d = int(rng.integers(1, 11))
        a = rng.standard_normal((d, d))
        cov = a @ a.T + 0.1 * np.eye(d)
        for method in ("pca", "cholesky"):
            A = factorize(cov, method)
            worst_f = max(worst_f, float(np.linalg.norm(A @ A.T - cov) / np.linalg.norm(cov)))
    dt = time.perf_counter() - t0
    ok = worst_w <= 1e-12 and rt <= 1e-9 and worst_f <= 1e-10 and dt < 30
    report(11, ok, f"max |w-1| {worst_w:.1e}, inverse-CDF round trip {rt:.1e}, "
                   f"max rel ||AA^T - S|| {worst_f:.1e}, {dt:.2f}s")
    assert ok


def test_criterion_12_discrepancy_ordering(report):
    t0 = time.perf_counter()
    ld = np.median([centered_l2_discrepancy(DigitalNet(2, seed=s).gen(0, 256)) for s in range(30)])
    iid = np.median([centered_l2_discrepancy(IIDGenerator(2, seed=s).gen(256)) for s in range(30)])
    mid = centered_l2_discrepancy(np.array([[0.5]]))
    dt = time.perf_counter() - t0
    ok = ld < iid and abs(mid - math.sqrt(1 / 12)) <= 1e-12 and dt < 60
    report(12, ok, f"median CD scrambled Sobol' {ld:.3e} < IID {iid:.3e}; midpoint CD {mid:.15f}; {dt:.2f}s")
    assert ok


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "qmckit.cli", *args], capture_output=True)


def test_criterion_13_cli_determinism_and_capacity(report):
    t0 = time.perf_counter()
    runs = [
        ["points", "--family", "net", "--d", "4", "--n-end", "512", "--seed", "13"],
        ["points", "--family", "lattice", "--d", "3", "--n-start", "100", "--n-end", "300", "--seed", "13",
         "--transform", "bm"],
        ["integrate", "keister", "--d", "5", "--criterion", "qmc-rep", "--abs-tol", "1e-3", "--seed", "13",
         "--no-timing"],
        ["compare", "keister", "--d", "3", "--tolerances", "1e-1,1e-2", "--seed", "13", "--no-timing"],
        ["discrepancy", "--family", "halton", "--d", "2", "--n", "128", "--seed", "13", "--compare-iid"],
    ]
    identical = True
    for argv in runs:
        a, b = _cli(*argv), _cli(*argv)
        identical &= a.returncode == b.returncode == 0 and a.stdout == b.stdout and len(a.stdout) > 0
    cap = _cli("points", "--family", "net", "--d", "2", "--n-end", str(2**32 + 1))
    cap_ok = cap.returncode == 1 and b"CapacityError" in cap.stderr and cap.stdout == b""
    dt = time.perf_counter() - t0
    ok = identical and cap_ok and dt < 60
    report(13, ok, f"{len(runs)} commands byte-identical across reruns: {identical}; n_end=2^32+1 on a net "
                   f"-> exit {cap.returncode} ({cap.stderr.decode().strip()[:60]}); {dt:.1f}s")
    assert ok
