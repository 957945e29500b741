"""Command-line harness: point dumps, integration, tolerance sweeps and diagnostics.

Exit codes: 0 success, 1 capacity/domain/parse failure, 2 usage error,
3 integration stopped on its budget before meeting the tolerance.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import shlex
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .cubature import DEFAULT_FAMILY, CRITERIA, Tolerance, fmt, integrate, make_criterion
from .errors import QMCError, UsageError
from .integrands import asian_call_problem, keister_lebesgue_problem, keister_problem
from .ld_core import UnrandomizedWarning, make_generator
from .measures import (
    KumaraswamyStep, TransformLadder, brownian_motion, gaussian_transform, ladder_transform,
    uniform_transform,
)
from .quality import centered_l2_discrepancy, stratification_check

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
FAMILIES = ("lattice", "net", "halton", "iid")
PROBLEMS = ("keister", "asian-call")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------- config files

def read_config(path):
    """Parse a ``key = value`` file into ``--key value`` tokens.

    Blank lines, ``#`` comments and ``[section]`` headers are skipped.  Values
    may be quoted; ``true`` becomes a bare flag, ``false`` drops the key and
    ``[a, b]`` lists are joined with commas.  The key ``command`` names the
    subcommand.
    """
    command, tokens = None, []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line or (line.startswith("[") and line.endswith("]") and "=" not in line):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            key = key.strip("\"'").replace("_", "-")
            if val.startswith("[") and val.endswith("]"):
                val = ",".join(v.strip().strip("\"'") for v in val[1:-1].split(",") if v.strip())
            else:
                val = " ".join(shlex.split(val)) if val else ""
            if key == "command":
                command = val
            elif val.lower() == "true":
                tokens.append(f"--{key}")
            elif val.lower() != "false":
                tokens += [f"--{key}", val]
    return command, tokens


def _expand_config(argv):
    argv = list(argv)
    if "--config" not in argv and not any(a.startswith("--config=") for a in argv):
        return argv
    out, path = [], None
    it = iter(argv)
    for a in it:
        if a == "--config":
            path = next(it, None)
            if path is None:
                raise UsageError("--config needs a file")
        elif a.startswith("--config="):
            path = a.split("=", 1)[1]
        else:
            out.append(a)
    command, tokens = read_config(path)
    cmds = {"points", "integrate", "compare", "discrepancy"}
    pos = next((i for i, a in enumerate(out) if a in cmds), None)
    if pos is None:
        if command is None:
            raise UsageError("no subcommand given on the command line or in the config file")
        return [command, *tokens, *out]
    # command-line flags come after the config tokens, so they win
    return out[:pos + 1] + tokens + out[pos + 1:]


# ---------------------------------------------------------------- helpers

def _floats(text, d=None, what="value"):
    try:
        vals = [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad {what} list {text!r}") from None
    if d is not None and len(vals) == 1:
        vals = vals * d
    if d is not None and len(vals) != d:
        raise UsageError(f"{what} needs 1 or {d} entries, got {len(vals)}")
    return np.array(vals)


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def points_csv(values):
    """CSV with an ``x1..xd`` header, or the empty string for no points."""
    if values.shape[0] == 0:
        return ""
    buf = io.StringIO()
    buf.write(",".join(f"x{k + 1}" for k in range(values.shape[1])) + "\n")
    for row in values:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def load_points(path):
    """Read a points CSV written by ``points`` (header optional)."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    if lines and not lines[0][0] in "0123456789+-.":
        lines = lines[1:]
    if not lines:
        return np.empty((0, 1))
    try:
        return np.array([[float(v) for v in ln.split(",")] for ln in lines], dtype=np.float64)
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _generator(args, d):
    return make_generator(args.family, d, seed=args.seed, randomize=args.randomize,
                          ordering=args.ordering, gen_file=args.gen_file)


def _sampler_flags(p, family_default=None):
    p.add_argument("--family", choices=FAMILIES, default=family_default)
    p.add_argument("--ordering", choices=("natural", "linear", "standard", "gray"))
    p.add_argument("--randomize")
    p.add_argument("--seed", type=int)
    p.add_argument("--gen-file")


# ---------------------------------------------------------------- points

def _points_ladder(args, d):
    kind = args.transform
    if kind == "none":
        return None
    if kind == "uniform":
        step = uniform_transform(_floats(args.lower, d, "lower"), _floats(args.upper, d, "upper"))
    elif kind == "gaussian":
        mean = _floats(args.mean, d, "mean")
        if args.cov_file:
            cov = np.loadtxt(args.cov_file, delimiter=",", ndmin=2)
        else:
            cov = np.eye(d)
        step = gaussian_transform(mean, cov, args.factorization)
    elif kind == "bm":
        step = brownian_motion(args.tau, d, args.drift, args.factorization)
    else:
        step = KumaraswamyStep(_floats(args.alpha, d, "alpha"), _floats(args.beta, d, "beta"))
    return TransformLadder([step])


def cmd_points(args):
    if args.d < 1:
        raise UsageError("--d must be positive")
    n_end = args.n_end
    if n_end < args.n_start:
        raise UsageError("--n-end must be >= --n-start")
    gen = _generator(args, args.d)
    ladder = _points_ladder(args, args.d)
    if args.family == "iid":
        if args.n_start != 0:
            raise UsageError("iid points have no index range; use --n-start 0")
        block = gen.gen(n_end)
    else:
        block = gen.gen(args.n_start, n_end)
    values = block.values
    if ladder is not None and block.n:
        values = ladder_transform(ladder, block)[0].values
    _write(points_csv(values), args.output)
    return EXIT_OK


# ---------------------------------------------------------------- integrate

def _resolve_problem(args):
    args.problem = args.problem or args.problem_key
    if args.problem is None:
        raise UsageError("no problem given (keister or asian-call)")


def build_problem(args):
    if args.problem == "keister":
        d = args.d or 5
        return keister_lebesgue_problem(d) if args.ladder == "lebesgue" else keister_problem(d)
    if args.problem == "asian-call":
        return asian_call_problem(S0=args.S0, K=args.strike, r=args.rate, sigma=args.sigma, tau=args.tau,
                                  d=args.d or 16, drift=args.drift, method=args.factorization)
    raise UsageError(f"unknown problem {args.problem!r}")


def _criterion_params(args, name):
    params = {"m_min": args.m_min, "m_max": args.m_max}
    if name == "qmc-rep":
        params["replications"] = args.replications
    elif name == "mc-clt":
        params = {"n_pilot": args.n_pilot, "n_max": args.n_max, "inflate": args.inflate}
    else:
        params["inflate"] = args.inflate
    return params


def run_one(args, criterion_name, abs_tol, family=None):
    """Integrate the configured problem once; used by integrate and compare."""
    problem = build_problem(args)
    family = family or args.family or DEFAULT_FAMILY[criterion_name]
    gen = make_generator(family, problem.d, seed=args.seed, randomize=args.randomize,
                         ordering=args.ordering, gen_file=args.gen_file)
    crit = make_criterion(criterion_name, **_criterion_params(args, criterion_name))
    return problem, integrate(problem, gen, crit, Tolerance(abs_tol, args.rel_tol))


def cmd_integrate(args):
    _resolve_problem(args)
    _, res = run_one(args, args.criterion, args.abs_tol)
    _write(res.to_json(timing=not args.no_timing) + "\n", args.output)
    return EXIT_OK if res.converged else EXIT_BUDGET


def _problem_flags(p):
    p.add_argument("problem", nargs="?", help="keister or asian-call")
    # lets a config file name the problem; the positional wins when both are given
    p.add_argument("--problem", dest="problem_key", help=argparse.SUPPRESS)
    p.add_argument("--d", type=int, help="dimension (keister 5, asian-call 16)")
    p.add_argument("--ladder", choices=("gaussian", "lebesgue"), default="gaussian",
                   help="keister formulation")
    p.add_argument("--S0", type=float, default=100.0)
    p.add_argument("--strike", type=float, default=100.0)
    p.add_argument("--rate", type=float, default=0.05)
    p.add_argument("--sigma", type=float, default=0.2)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--drift", type=float, default=0.0)
    p.add_argument("--factorization", choices=("pca", "cholesky"), default="pca")
    p.add_argument("--rel-tol", type=float, default=0.0)
    p.add_argument("--m-min", type=int)
    p.add_argument("--m-max", type=int)
    p.add_argument("--replications", type=int)
    p.add_argument("--inflate", type=float)
    p.add_argument("--n-pilot", type=int)
    p.add_argument("--n-max", type=int)
    p.add_argument("--no-timing", action="store_true", help="report time_sec as 0 for reproducible output")
    p.add_argument("--output", "-o")


# ---------------------------------------------------------------- compare

def _compare_job(job):
    args, method, tol = job
    problem, res = run_one(args, method, tol, family=DEFAULT_FAMILY[method])
    err = abs(res.estimate - problem.exact) if problem.exact is not None else math.nan
    return tol, method, res, err


def svg_loglog(panels, width=360, height=280):
    """Minimal log-log line chart; ``panels`` is a list of (title, xlabel, ylabel, {name: [(x, y)]})."""
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]
    pad = 48
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width * len(panels)}" height="{height}" '
           'font-family="sans-serif" font-size="11">']
    for k, (title, xlabel, ylabel, series) in enumerate(panels):
        pts = [(x, y) for s in series.values() for x, y in s if x > 0 and y > 0]
        ox = k * width
        out.append(f'<text x="{ox + width / 2}" y="16" text-anchor="middle">{title}</text>')
        out.append(f'<rect x="{ox + pad}" y="{pad / 2}" width="{width - 1.5 * pad}" '
                   f'height="{height - 1.5 * pad}" fill="none" stroke="#444"/>')
        out.append(f'<text x="{ox + width / 2}" y="{height - 6}" text-anchor="middle">{xlabel}</text>')
        out.append(f'<text x="{ox + 12}" y="{height / 2}" transform="rotate(-90 {ox + 12} {height / 2})" '
                   f'text-anchor="middle">{ylabel}</text>')
        if not pts:
            continue
        lx = np.log10([p[0] for p in pts])
        ly = np.log10([p[1] for p in pts])
        x0, x1 = math.floor(lx.min()), math.ceil(lx.max())
        y0, y1 = math.floor(ly.min()), math.ceil(ly.max())
        x1, y1 = max(x1, x0 + 1), max(y1, y0 + 1)

        def px(x, y):
            u = (math.log10(x) - x0) / (x1 - x0)
            v = (math.log10(y) - y0) / (y1 - y0)
            return ox + pad + u * (width - 1.5 * pad), pad / 2 + (1 - v) * (height - 1.5 * pad)

        for e in range(x0, x1 + 1):
            sx, _ = px(10.0**e, 10.0**y0)
            out.append(f'<text x="{sx:.1f}" y="{height - 1.5 * pad + pad / 2 + 12}" '
                       f'text-anchor="middle">1e{e}</text>')
        for e in range(y0, y1 + 1):
            _, sy = px(10.0**x0, 10.0**e)
            out.append(f'<text x="{ox + pad - 4}" y="{sy + 4:.1f}" text-anchor="end">1e{e}</text>')
        for i, (name, s) in enumerate(series.items()):
            c = colors[i % len(colors)]
            xy = [px(x, y) for x, y in sorted(s) if x > 0 and y > 0]
            if xy:
                path = " ".join(f"{a:.1f},{b:.1f}" for a, b in xy)
                out.append(f'<polyline points="{path}" fill="none" stroke="{c}" stroke-width="1.5"/>')
                out += [f'<circle cx="{a:.1f}" cy="{b:.1f}" r="2.5" fill="{c}"/>' for a, b in xy]
            out.append(f'<text x="{ox + pad + 6}" y="{pad / 2 + 14 + 13 * i}" fill="{c}">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def cmd_compare(args):
    _resolve_problem(args)
    if args.problem not in PROBLEMS:
        raise UsageError(f"unknown problem {args.problem!r}; choose from {', '.join(PROBLEMS)}")
    tols = list(_floats(args.tolerances, what="tolerance"))
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if not tols or not methods:
        raise UsageError("need at least one tolerance and one method")
    for m in methods:
        if m not in CRITERIA:
            raise UsageError(f"unknown method {m!r}; choose from {sorted(CRITERIA)}")
    if args.jobs < 1:
        raise UsageError("--jobs must be positive")
    # the sampler flags belong to each method's default family
    args.family = None
    jobs = [(args, m, t) for t in tols for m in methods]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_compare_job, jobs))
    else:
        results = [_compare_job(j) for j in jobs]
    lines = ["tolerance,method,n,time_sec,estimate,abs_error_vs_oracle"]
    budget = False
    for tol, method, res, err in results:
        budget |= not res.converged
        t = res.elapsed_seconds if not args.no_timing else 0.0
        lines.append(",".join([fmt(tol), method, str(res.n_total), fmt(t), fmt(res.estimate), fmt(err)]))
    _write("\n".join(lines) + "\n", args.output)
    if args.svg:
        by_n = {m: [(t, r.n_total) for t, mm, r, _ in results if mm == m] for m in methods}
        by_t = {m: [(t, r.elapsed_seconds) for t, mm, r, _ in results if mm == m] for m in methods}
        panels = [("sample size", "tolerance", "n", by_n)]
        if not args.no_timing:
            panels.append(("run time", "tolerance", "seconds", by_t))
        _write(svg_loglog(panels), args.svg)
    return EXIT_BUDGET if budget else EXIT_OK


# ---------------------------------------------------------------- discrepancy

def cmd_discrepancy(args):
    if args.input:
        x = load_points(args.input)
        source = "file"
    else:
        if args.family is None:
            raise UsageError("give --input or --family")
        gen = _generator(args, args.d)
        x = (gen.gen(args.n) if args.family == "iid" else gen.gen(0, args.n)).values
        source = args.family
    cd = centered_l2_discrepancy(x)
    n, d = x.shape
    rec = {"source": source, "n": int(n), "d": int(d), "cd": cd}
    m = int(round(math.log2(n))) if n > 0 else -1
    rec["stratified"] = [bool(v) for v in stratification_check(x, m)] if 2**m == n else None
    if args.compare_iid:
        if args.family in (None, "iid"):
            raise UsageError("--compare-iid needs a low-discrepancy --family")
        base = 0 if args.seed is None else args.seed
        ld = [centered_l2_discrepancy(make_generator(args.family, d, seed=base + s, randomize=args.randomize,
                                                     ordering=args.ordering, gen_file=args.gen_file)
                                      .gen(0, n)) for s in range(args.seeds)]
        iid = [centered_l2_discrepancy(make_generator("iid", d, seed=base + s).gen(n)) for s in range(args.seeds)]
        rec.update(ld_median_cd=float(np.median(ld)), iid_median_cd=float(np.median(iid)),
                   ld_beats_iid=bool(np.median(ld) < np.median(iid)))
    parts = []
    for key, val in rec.items():
        parts.append(f'"{key}": {fmt(val)}' if isinstance(val, float) else f'"{key}": {json.dumps(val)}')
    _write("{" + ", ".join(parts) + "}\n", args.output)
    return EXIT_OK


# ---------------------------------------------------------------- entry point

def build_parser():
    ap = _Parser(prog="qmckit", description="Low-discrepancy sampling and adaptive cubature.")
    ap.add_argument("--version", action="version", version=f"qmckit {__version__}")
    ap.add_argument("--config", help="key = value file of default flags")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("points", help="dump a block of points as CSV")
    _sampler_flags(p, "lattice")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n-start", type=int, default=0)
    p.add_argument("--n-end", type=int, required=True)
    p.add_argument("--transform", choices=("none", "uniform", "gaussian", "bm", "kumaraswamy"), default="none")
    p.add_argument("--lower", default="0")
    p.add_argument("--upper", default="1")
    p.add_argument("--mean", default="0")
    p.add_argument("--cov-file", help="CSV covariance matrix for --transform gaussian")
    p.add_argument("--factorization", choices=("pca", "cholesky"), default="pca")
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--drift", type=float, default=0.0)
    p.add_argument("--alpha", default="0.8")
    p.add_argument("--beta", default="0.8")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_points)

    p = sub.add_parser("integrate", help="adaptive cubature, one JSON line")
    _problem_flags(p)
    _sampler_flags(p)
    p.add_argument("--criterion", choices=sorted(CRITERIA), default="qmc-net")
    p.add_argument("--abs-tol", type=float, default=1e-2)
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("compare", help="tolerance sweep over several criteria, CSV (+ SVG)")
    _problem_flags(p)
    p.add_argument("--tolerances", default="1e-1,1e-2")
    p.add_argument("--methods", default="mc-clt,qmc-lattice")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--svg")
    p.set_defaults(func=cmd_compare, ordering=None, randomize=None, gen_file=None, family=None)

    p = sub.add_parser("discrepancy", help="centered L2 discrepancy and stratification, JSON")
    _sampler_flags(p)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--input", help="points CSV instead of a generated block")
    p.add_argument("--compare-iid", action="store_true", help="median CD over seeds against IID")
    p.add_argument("--seeds", type=int, default=30)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_discrepancy)
    return ap


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(_expand_config(argv))
        if args.command is None:
            raise UsageError("missing subcommand (points, integrate, compare, discrepancy)")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", UnrandomizedWarning)
            code = args.func(args)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        return code
    except UsageError as exc:
        print(f"qmckit: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QMCError, OSError, ValueError) as exc:
        print(f"qmckit: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
