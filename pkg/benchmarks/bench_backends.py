"""Time the compiled kernels against their numpy twins.

    python benchmarks/bench_backends.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from silc import RobotArmParams, build_lifted, linearized_model
from silc import _backend


def cases(n, rng):
    lm = build_lifted(linearized_model(RobotArmParams()), n + 1)
    u = rng.uniform(-1, 1, lm.N)
    lo, hi = np.full(lm.N, -12.0), np.full(lm.N, 12.0)
    b = rng.uniform(-15, 15, lm.N)
    small = rng.uniform(-3, 3, 8)
    p = RobotArmParams()
    no_trace = np.empty(0)
    return {
        f"toeplitz G u (N={lm.N})": lambda k: k.toeplitz_apply(lm.markov, u),
        f"toeplitz G^T e (N={lm.N})": lambda k: k.toeplitz_apply_t(lm.markov, u),
        f"dual prox, 200 iters (N={lm.N})": lambda k: k.tv_dual_apg(b, 0.5, lo, hi, 200, 0.0, no_trace),
        f"arm rollout (T={lm.N})": lambda k: k.arm_rollout(u, p.Ts, p.g, p.l, p.m, p.c),
        "subgradient oracle, 1e5 iters (N=8)": lambda k: k.tv_subgradient(
            small, 0.5, np.full(8, -1.0), np.full(8, 1.0), 100_000
        ),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1199, help="signal length")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    names = _backend.available()
    if "compiled" not in names:
        print("compiled extension not built; only the numpy backend is available")
    backends = {name: _backend.get(name) for name in names}
    rng = np.random.default_rng(0)

    print(f"{'kernel':40s}" + "".join(f"{n:>12s}" for n in backends) + "     speedup")
    for label, fn in cases(args.n, rng).items():
        times = {}
        for name, k in backends.items():
            fn(k)  # warm up
            times[name] = min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat))
        line = f"{label:40s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times.values())
        if len(times) == 2:
            line += f"  {times['numpy'] / times['compiled']:9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
