"""Command line entry point: ``silc run``, ``silc sweep``, ``silc prox-bench``."""
import argparse
import logging
import sys

import numpy as np

from . import reference
from .errors import ConfigError
from .harness import EXIT_BENCH, EXIT_CONFIG, EXIT_OK, load_config, run_experiment
from .tv_prox import BoxSet, TVProxProblem, solve_tv_prox

BENCH_TOL = 1e-6


def _add_common(p, suppress):
    default = argparse.SUPPRESS if suppress else None
    p.add_argument("--jobs", type=int, default=argparse.SUPPRESS if suppress else 1,
                   help="worker processes for independent runs")
    p.add_argument("--output-dir", default=default, help="overrides the config's output_dir")
    p.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS if suppress else False)


def build_parser():
    parser = argparse.ArgumentParser(prog="silc", description=__doc__)
    _add_common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in (("run", "run every (variant, lambda) pair in a config"),
                        ("sweep", "run a lambda sweep and write summary.csv")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("config", help="JSON config (a manifest.json also works)")
        _add_common(p, suppress=True)

    p = sub.add_parser("prox-bench", help="compare the dual prox solver with primal oracles")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--b", type=float, nargs="+", help="explicit prox centre instead of a random one")
    p.add_argument("--box", type=float, default=1.0, help="symmetric bound on u")
    p.add_argument("--iters", type=int, default=5000, help="dual solver iterations")
    p.add_argument("--oracle-iters", type=int, default=reference.SUBGRADIENT_ITERS)
    _add_common(p, suppress=True)
    return parser


def cmd_prox_bench(args):
    if args.n < 2:
        print("error: --n must be >= 2", file=sys.stderr)
        return EXIT_CONFIG
    if args.b is not None:
        b = np.asarray(args.b, dtype=float)
        if b.size != args.n:
            print(f"error: --b needs {args.n} values", file=sys.stderr)
            return EXIT_CONFIG
    else:
        b = np.random.default_rng(args.seed).uniform(-5.0, 5.0, args.n)
    box = BoxSet.symmetric(args.box)
    prob = TVProxProblem(b, args.lam, box)
    sol = solve_tv_prox(prob, args.iters, trace=True)
    f_alg = reference.primal_objective(sol.u, b, args.lam)

    print(f"n={args.n} lambda={args.lam:g} box=[{-args.box:g}, {args.box:g}] iterations={sol.iterations_used}")
    print("b = " + np.array2string(b, precision=6))
    if sol.dual_objective_trace.size:
        marks = sorted({0, *np.linspace(0, sol.iterations_used - 1, 6).astype(int)})
        for k in marks:
            print(f"  dual objective @ {k + 1:6d}: {sol.dual_objective_trace[k]:.12e}")
    print(f"dual solver   u = {np.array2string(sol.u, precision=8)}  F = {f_alg:.15e}")

    gaps = {}
    _, f_sub = reference.subgradient_tv(b, args.lam, box, n_iter=args.oracle_iters)
    gaps["subgradient"] = f_alg - f_sub
    if args.n <= 8:
        _, f_enum = reference.enumerate_tv(b, args.lam, box)
        gaps["enumeration"] = f_alg - f_enum
    if args.n == 2:
        gaps["closed form"] = f_alg - reference.primal_objective(reference.two_point(b, args.lam, -args.box, args.box), b, args.lam)
    for name, gap in gaps.items():
        print(f"gap vs {name:12s}: {gap:+.3e}")
    worst = max(abs(g) for g in gaps.values())
    if worst < BENCH_TOL:
        print(f"PASS (max |gap| {worst:.3e} < {BENCH_TOL:g})")
        return EXIT_OK
    print(f"FAIL (max |gap| {worst:.3e} >= {BENCH_TOL:g})")
    return EXIT_BENCH


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "prox-bench":
        return cmd_prox_bench(args)
    try:
        cfg = load_config(args.config)
        code, _ = run_experiment(cfg, output_dir=args.output_dir, jobs=max(1, args.jobs),
                                 summary=args.command == "sweep")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return code


if __name__ == "__main__":
    sys.exit(main())
