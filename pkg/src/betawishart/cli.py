"""Command line interface.

Subcommands write CSV (header row, comma separated, ``\\n`` line ends,
17 significant digits) to ``--out`` or standard output.  Exit codes:
0 success, 2 usage or validation error, 3 numerical convergence failure.
"""

import argparse
import math
import sys

import numpy as np

from .densities import DEFAULT_DEGREE_CAP, DensityQuery, cdf_lambda_max, cdf_lambda_min
from .errors import ConvergenceError, InvalidArgumentError
from .hypergeom import SeriesTruncation, log_hyp0f0, log_hyp1f1
from .jack import as_partition, jack_C, jack_values
from .montecarlo import run_extreme_experiment, run_free_probability_experiment, write_csv
from .rng import RngStream
from .sampler import WishartParams, sample_eigenvalues

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class _Usage(Exception):
    pass


def _floats(text, name):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise _Usage(f"{name} must be a comma separated list of numbers")
    if not vals:
        raise _Usage(f"{name} is empty")
    return np.array(vals)


def _grid(text):
    """'a,b,c' or 'start:stop:count'."""
    if text is None:
        return None
    if ":" in text:
        try:
            lo, hi, cnt = text.split(":")
            cnt = int(cnt)
            lo, hi = float(lo), float(hi)
        except ValueError:
            raise _Usage("grid range must look like start:stop:count")
        if cnt < 1:
            raise _Usage("grid is empty")
        return np.linspace(lo, hi, cnt)
    return _floats(text, "grid")


def _params(args):
    if args.m is None or args.n is None:
        raise _Usage("--m and --n are required")
    cov = None
    if args.cov is not None:
        cov = _floats(args.cov, "cov")
        if cov.size == 1:
            cov = float(cov[0])
    return WishartParams(args.m, args.n, args.beta, cov)


def _truncation(args, cap=None):
    cap = args.degree_cap if cap is None else cap
    return SeriesTruncation(args.max_degree, args.tail_tol, max(cap, args.max_degree))


def _need_seed(args):
    if args.seed is None:
        raise _Usage("--seed is required for this subcommand")
    return args.seed


def _emit(args, header, rows):
    if args.out:
        write_csv(args.out, header, rows)
    else:
        write_csv(sys.stdout, header, rows)


def cmd_sample(args):
    p = _params(args)
    seed = _need_seed(args)
    lam = sample_eigenvalues(RngStream(seed), p, size=args.draws)
    _emit(args, [f"lambda_{i + 1}" for i in range(p.n)], (list(r) for r in lam))


def cmd_cdf(args):
    p = _params(args)
    grid = _grid(args.grid)
    if grid is None:
        raise _Usage("--grid is required")
    q = DensityQuery(p, _truncation(args))
    f = cdf_lambda_max if args.which == "max" else cdf_lambda_min
    res = f(grid, q)
    rows = zip(grid, res.clamped, res.raw, res.tail_estimate)
    _emit(args, ["x", "analytic_cdf", "analytic_raw", "tail_estimate"], rows)


def cmd_jack(args):
    x = _floats(args.x, "x")
    if args.kappa:
        kappa = as_partition(tuple(int(v) for v in args.kappa.split(",")))
        rows = [("(" + " ".join(map(str, kappa.parts)) + ")", float(jack_C(kappa, args.beta, x)))]
    else:
        jv = jack_values(x, args.beta, args.max_degree)
        vals = jv.values()
        rows = []
        for parts, v in zip(jv.parts, vals):
            kap = as_partition(parts)
            rows.append(("(" + " ".join(map(str, kap.parts)) + ")", float(v)))
    _emit(args, ["kappa", "value"], rows)


def cmd_hyp(args):
    x = _floats(args.x, "x")
    t = _truncation(args, cap=args.degree_cap if args.degree_cap else args.max_degree)
    if args.kind == "0f0":
        y = np.ones_like(x) if args.y is None else _floats(args.y, "y")
        res = log_hyp0f0(x, y, args.beta, t, shift=args.shift)
    else:
        if args.a is None or args.b is None:
            raise _Usage("1f1 needs --a and --b")
        res = log_hyp1f1(args.a, args.b, x, args.beta, t)
    _emit(args, ["value", "log_abs", "sign", "tail_estimate", "degree", "converged"],
          [(res.value, float(res.log_abs), float(res.sign), res.tail_estimate, res.degree,
            int(res.converged))])


def cmd_experiment(args):
    p = _params(args)
    seed = _need_seed(args)
    grid = _grid(args.grid)
    rep = run_extreme_experiment(p, args.which, args.draws, grid, seed, _truncation(args))
    _emit(args, rep.HEADER, rep.rows())
    print(f"ks={rep.ks:.6g} draws={rep.draws} seed={rep.seed}", file=sys.stderr)


def cmd_freeprob(args):
    seed = _need_seed(args)
    m, n, draws = args.m, args.n, args.draws
    if args.full:
        m, n, draws = 1000, 100, 1000
    m = 500 if m is None else m
    n = 50 if n is None else n
    draws = 200 if draws is None else draws
    rep = run_free_probability_experiment(m, n, args.beta, draws, args.center, args.radius,
                                          seed, args.bins, oracle=not args.no_oracle)
    _emit(args, rep.HEADER, rep.rows())
    msg = f"mean={rep.mean:.6g} stderr={rep.draw_mean_stderr:.3g}"
    if rep.ks_to_oracle is not None:
        msg += f" ks_to_beta1_oracle={rep.ks_to_oracle:.4g}"
    print(msg, file=sys.stderr)


def build_parser():
    ap = argparse.ArgumentParser(
        prog="betawishart",
        description="Sampling, CDFs and series for the beta-Wishart ensemble.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, ensemble=True, draws=None):
        if ensemble:
            sp.add_argument("--m", type=float)
            sp.add_argument("--n", type=int)
            sp.add_argument("--cov", help="covariance diagonal, comma list or one scalar")
        sp.add_argument("--beta", type=float, default=1.0)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--draws", type=int, default=draws)
        sp.add_argument("--out", help="output CSV path (default stdout)")
        sp.add_argument("--max-degree", type=int, default=30)
        sp.add_argument("--degree-cap", type=int, default=DEFAULT_DEGREE_CAP)
        sp.add_argument("--tail-tol", type=float, default=1e-9)

    sp = sub.add_parser("sample", help="eigenvalue draws")
    common(sp, draws=1)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("cdf", help="analytic extreme eigenvalue CDF on a grid")
    common(sp)
    sp.add_argument("--which", choices=("max", "min"), default="max")
    sp.add_argument("--grid", help="comma list or start:stop:count")
    sp.set_defaults(func=cmd_cdf)

    sp = sub.add_parser("jack", help="Jack polynomials C_kappa(x)")
    common(sp, ensemble=False)
    sp.add_argument("--x", required=True)
    sp.add_argument("--kappa", help="one partition, e.g. 2,1; omit for all up to --max-degree")
    sp.set_defaults(func=cmd_jack)

    sp = sub.add_parser("hyp", help="0F0(x, y) or 1F1(a; b; x)")
    common(sp, ensemble=False)
    sp.add_argument("--kind", choices=("0f0", "1f1"), default="0f0")
    sp.add_argument("--x", required=True)
    sp.add_argument("--y")
    sp.add_argument("--a", type=float)
    sp.add_argument("--b", type=float)
    sp.add_argument("--shift", choices=("center", "same_sign"))
    sp.set_defaults(func=cmd_hyp, degree_cap=0)

    sp = sub.add_parser("experiment", help="sampled vs analytic extreme eigenvalue CDF")
    common(sp, draws=10000)
    sp.add_argument("--which", choices=("max", "min"), default="max")
    sp.add_argument("--grid", help="defaults to 99 empirical quantiles")
    sp.set_defaults(func=cmd_experiment)

    sp = sub.add_parser("freeprob", help="semicircle covariance histogram experiment")
    common(sp, ensemble=False)
    sp.add_argument("--m", type=float)
    sp.add_argument("--n", type=int)
    sp.add_argument("--center", type=float, default=3.0)
    sp.add_argument("--radius", type=float, default=math.sqrt(2.0))
    sp.add_argument("--bins", type=int, default=60)
    sp.add_argument("--no-oracle", action="store_true")
    sp.add_argument("--full", action="store_true", help="m=1000, n=100, 1000 draws")
    sp.set_defaults(func=cmd_freeprob, beta=3.0)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    try:
        args.func(args)
    except _Usage as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidArgumentError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as e:
        print(f"convergence failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
