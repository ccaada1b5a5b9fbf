"""Independent solvers for the box-constrained TV prox, used as oracles.

None of these share code with the dual accelerated solver in
:mod:`silc.tv_prox`; they work on the primal problem directly.
"""
import itertools

import numpy as np

from ._backend import kernels
from .tv_prox import BoxSet

SUBGRADIENT_ITERS = 10**6


def primal_objective(u, b, lam):
    u = np.asarray(u, dtype=float)
    return float(0.5 * np.sum((u - b) ** 2) + lam * np.abs(np.diff(u)).sum())


def two_point(b, lam, lo=-np.inf, hi=np.inf):
    """Closed form for ``N = 2`` with a scalar box.

    Without the box the two values move toward each other by ``lam`` each,
    meeting at the mean once ``|b1 - b2| <= 2 lam``. For a scalar box the
    constrained solution is the clipped unconstrained one.
    """
    b1, b2 = map(float, b)
    gap = b1 - b2
    if abs(gap) <= 2.0 * lam:
        u = np.full(2, 0.5 * (b1 + b2))
    else:
        s = np.sign(gap)
        u = np.array([b1 - lam * s, b2 + lam * s])
    return np.clip(u, lo, hi)


def _segment_values(b, lam, lo, hi, starts, signs):
    """Per-segment minimiser once the fused runs and jump signs are fixed.

    ``starts`` are the first indices of each run (beginning with 0);
    ``signs[j]`` is the sign of the jump between run ``j`` and ``j + 1``.
    Returns None when a run's bounds are incompatible.
    """
    n = b.size
    ends = list(starts[1:]) + [n]
    u = np.empty(n)
    for s, (a, z) in enumerate(zip(starts, ends)):
        left = signs[s - 1] if s > 0 else 0.0
        right = signs[s] if s < len(signs) else 0.0
        seg_lo, seg_hi = lo[a:z].max(), hi[a:z].min()
        if seg_lo > seg_hi:
            return None
        v = b[a:z].mean() - lam * (left - right) / (z - a)
        u[a:z] = min(max(v, seg_lo), seg_hi)
    return u


def enumerate_tv(b, lam, box=BoxSet()):
    """Exact minimiser by enumerating fused runs and jump signs.

    Each candidate is feasible and the optimum is among them, so the best
    candidate is the solution. Cost grows like ``6^N``; keep ``N <= 10``.
    """
    b = np.asarray(b, dtype=float)
    n = b.size
    if n > 10:
        raise ValueError("enumeration limited to N <= 10")
    lo, hi = box.bounds(n)
    best_u, best_f = None, np.inf
    for cuts in itertools.product((False, True), repeat=n - 1):
        starts = [0] + [i + 1 for i, c in enumerate(cuts) if c]
        for signs in itertools.product((-1.0, 1.0), repeat=len(starts) - 1):
            u = _segment_values(b, lam, lo, hi, starts, signs)
            if u is None:
                continue
            f = primal_objective(u, b, lam)
            if f < best_f:
                best_u, best_f = u, f
    return best_u, best_f


def _polish(u, b, lam, lo, hi, tol):
    d = np.diff(u)
    cut = np.abs(d) > tol
    starts = [0] + [i + 1 for i in np.flatnonzero(cut)]
    signs = np.sign(d[cut])
    return _segment_values(b, lam, lo, hi, starts, signs)


def subgradient_tv(b, lam, box=BoxSet(), n_iter=SUBGRADIENT_ITERS, polish=True):
    """Projected subgradient (step ``1/k``) on the primal, then an exact polish.

    The raw subgradient method stalls around ``1e-4`` in objective. The
    polish reads the fused runs and jump signs off the iterates at several
    thresholds, solves the runs exactly, and keeps the best feasible point.
    Returns ``(u, objective)``.
    """
    b = np.ascontiguousarray(b, dtype=float)
    lo, hi = box.bounds(b.size)
    best, f_best, avg = kernels.tv_subgradient(b, float(lam), lo, hi, int(n_iter))
    candidates = [np.asarray(best), np.clip(avg, lo, hi)]
    if polish:
        for start in candidates[:2]:
            for tol in np.logspace(-1, -8, 15):
                u = _polish(start, b, lam, lo, hi, tol)
                if u is not None:
                    candidates.append(u)
    objs = [primal_objective(u, b, lam) for u in candidates]
    i = int(np.argmin(objs))
    return candidates[i], objs[i]
