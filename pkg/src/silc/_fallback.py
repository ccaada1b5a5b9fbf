"""Numpy implementations of the compiled kernels.

Signatures and return values mirror ``_kernels`` exactly so the two are
interchangeable. Results agree to rounding, not bit for bit.
"""
import numpy as np


def toeplitz_apply(markov, u):
    return np.convolve(markov, u)[: u.shape[0]]


def toeplitz_apply_t(markov, e):
    n = e.shape[0]
    return np.convolve(e[::-1], markov)[:n][::-1].copy()


def _apply_L(p):
    out = np.zeros(p.shape[0] + 1)
    out[:-1] = p
    out[1:] -= p
    return out


def tv_dual_apg(b, lam, lo, hi, n_iter, exit_tol, trace):
    m = b.shape[0] - 1
    step = 1.0 / (lam * 4.0)
    p = np.zeros(m)
    q = np.zeros(m)
    t = 1.0
    used = 0
    for k in range(n_iter):
        proj = np.clip(b - lam * _apply_L(q), lo, hi)
        x = q + step * (proj[:-1] - proj[1:])
        p_old = p
        p = x / np.maximum(1.0, np.abs(x))
        t_next = (1.0 + np.sqrt(1.0 + 4.0 * t * t)) / 2.0
        delta = p - p_old
        q = p + ((t - 1.0) / t_next) * delta
        t = t_next
        used = k + 1
        if trace.shape[0]:
            w = b - lam * _apply_L(p)
            r = np.clip(w, lo, hi) - w
            trace[k] = np.dot(w, w) - np.dot(r, r)
        if exit_tol > 0.0 and np.max(np.abs(delta), initial=0.0) < exit_tol:
            break
    return p, used


def arm_rollout(u, Ts, g, l, m, c):
    a = g * Ts / l
    damp = 1.0 - c * Ts / (m * l * l)
    gain = Ts / (m * l * l)
    theta = np.zeros(u.shape[0] + 1)
    x1 = x2 = 0.0
    sin = np.sin
    isfinite = np.isfinite
    for t, ut in enumerate(u.tolist()):
        x1, x2 = x1 + Ts * x2, -a * float(sin(x1)) + damp * x2 + gain * ut
        theta[t + 1] = x1
        if not (isfinite(x1) and isfinite(x2)):
            return theta, t + 1
    return theta, -1


def _tv_objective(u, b, lam):
    return 0.5 * np.dot(u - b, u - b) + lam * np.abs(np.diff(u)).sum()


def tv_subgradient(b, lam, lo, hi, n_iter):
    u = np.clip(b, lo, hi)
    best = u.copy()
    f_best = _tv_objective(u, b, lam)
    avg = np.zeros_like(u)
    wsum = 0.0
    for k in range(1, n_iter + 1):
        s = lam * np.sign(np.diff(u))
        grad = u - b
        grad[1:] += s
        grad[:-1] -= s
        u = np.clip(u - grad * (1.0 / k), lo, hi)
        avg += k * u
        wsum += k
        f = _tv_objective(u, b, lam)
        if f < f_best:
            f_best = f
            best = u.copy()
    return best, f_best, avg / wsum
