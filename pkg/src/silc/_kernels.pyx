# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.

Every function here has a numpy twin in ``_fallback`` with the same
signature and return convention; ``_backend`` picks one at import time.
"""
import numpy as np

# np.convolve is already vectorised C; a hand loop here measured no faster.
from ._fallback import toeplitz_apply, toeplitz_apply_t

from libc.math cimport sqrt, sin, fabs, isfinite


cdef inline double _clamp(double x, double lo, double hi) nogil:
    if x < lo:
        return lo
    if x > hi:
        return hi
    return x


cdef inline void _apply_L(const double* p, double* out, Py_ssize_t n) nogil:
    # out has length n, p has length n - 1
    cdef Py_ssize_t i
    out[0] = p[0]
    for i in range(1, n - 1):
        out[i] = p[i] - p[i - 1]
    out[n - 1] = -p[n - 2]


def tv_dual_apg(const double[::1] b, double lam, const double[::1] lo,
                const double[::1] hi, long n_iter, double exit_tol,
                double[::1] trace):
    """Accelerated projected gradient on the dual of box-constrained 1-D TV.

    Returns ``(p, iterations_used)``. ``trace`` receives the dual objective
    after each iteration when its length is nonzero. ``exit_tol <= 0``
    disables the early exit.
    """
    cdef Py_ssize_t n = b.shape[0]
    cdef Py_ssize_t m = n - 1
    cdef Py_ssize_t i
    cdef long k, used = 0
    cdef double step = 1.0 / (lam * 4.0)
    cdef double t = 1.0, t_next, coef, x, w, z, h, r, delta, dmax
    cdef bint want_trace = trace.shape[0] > 0

    p_arr = np.zeros(m, dtype=np.float64)
    cdef double[::1] p = p_arr
    cdef double[::1] p_old = np.zeros(m, dtype=np.float64)
    cdef double[::1] q = np.zeros(m, dtype=np.float64)
    cdef double[::1] lq = np.empty(n, dtype=np.float64)
    cdef double[::1] proj = np.empty(n, dtype=np.float64)

    with nogil:
        for k in range(n_iter):
            _apply_L(&q[0], &lq[0], n)
            for i in range(n):
                proj[i] = _clamp(b[i] - lam * lq[i], lo[i], hi[i])
            for i in range(m):
                p_old[i] = p[i]
                x = q[i] + step * (proj[i] - proj[i + 1])
                p[i] = x / (fabs(x) if fabs(x) > 1.0 else 1.0)
            t_next = (1.0 + sqrt(1.0 + 4.0 * t * t)) / 2.0
            coef = (t - 1.0) / t_next
            dmax = 0.0
            for i in range(m):
                delta = p[i] - p_old[i]
                q[i] = p[i] + coef * delta
                if fabs(delta) > dmax:
                    dmax = fabs(delta)
            t = t_next
            used = k + 1
            if want_trace:
                _apply_L(&p[0], &lq[0], n)
                h = 0.0
                for i in range(n):
                    w = b[i] - lam * lq[i]
                    z = _clamp(w, lo[i], hi[i])
                    r = z - w
                    h = h + w * w - r * r
                trace[k] = h
            if exit_tol > 0.0 and dmax < exit_tol:
                break
    return p_arr, used


def arm_rollout(const double[::1] u, double Ts, double g, double l, double m,
                double c):
    """Angle trajectory of the discretised arm from rest.

    Returns ``theta`` of length ``len(u) + 1`` (``theta[0] = 0``) and the
    index of the first non-finite state, or -1.
    """
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t t
    cdef double x1 = 0.0, x2 = 0.0, x1n
    cdef double a = g * Ts / l
    cdef double damp = 1.0 - c * Ts / (m * l * l)
    cdef double gain = Ts / (m * l * l)
    cdef Py_ssize_t bad = -1
    out = np.zeros(n + 1, dtype=np.float64)
    cdef double[::1] theta = out
    with nogil:
        for t in range(n):
            x1n = x1 + Ts * x2
            x2 = -a * sin(x1) + damp * x2 + gain * u[t]
            x1 = x1n
            theta[t + 1] = x1
            if not (isfinite(x1) and isfinite(x2)):
                bad = t + 1
                break
    return out, bad


cdef inline double _tv_objective(const double* u, const double* b,
                                 double lam, Py_ssize_t n) nogil:
    cdef Py_ssize_t i
    cdef double f = 0.0
    for i in range(n):
        f = f + 0.5 * (u[i] - b[i]) * (u[i] - b[i])
    for i in range(n - 1):
        f = f + lam * fabs(u[i + 1] - u[i])
    return f


def tv_subgradient(const double[::1] b, double lam, const double[::1] lo,
                   const double[::1] hi, long n_iter):
    """Projected subgradient with step 1/k on the primal TV problem.

    Returns ``(u_best, f_best, u_avg)`` where ``u_avg`` is the k-weighted
    iterate average.
    """
    cdef Py_ssize_t n = b.shape[0]
    cdef Py_ssize_t i
    cdef long k
    cdef double s, d, f, f_best, step, wsum = 0.0

    u_arr = np.empty(n, dtype=np.float64)
    best_arr = np.empty(n, dtype=np.float64)
    avg_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] u = u_arr
    cdef double[::1] best = best_arr
    cdef double[::1] avg = avg_arr
    cdef double[::1] grad = np.empty(n, dtype=np.float64)

    with nogil:
        for i in range(n):
            u[i] = _clamp(b[i], lo[i], hi[i])
            best[i] = u[i]
        f_best = _tv_objective(&u[0], &b[0], lam, n)
        for k in range(1, n_iter + 1):
            for i in range(n):
                grad[i] = u[i] - b[i]
            for i in range(n - 1):
                d = u[i + 1] - u[i]
                s = 1.0 if d > 0.0 else (-1.0 if d < 0.0 else 0.0)
                grad[i + 1] = grad[i + 1] + lam * s
                grad[i] = grad[i] - lam * s
            step = 1.0 / <double>k
            for i in range(n):
                u[i] = _clamp(u[i] - grad[i] * step, lo[i], hi[i])
                avg[i] = avg[i] + <double>k * u[i]
            wsum = wsum + <double>k
            f = _tv_objective(&u[0], &b[0], lam, n)
            if f < f_best:
                f_best = f
                for i in range(n):
                    best[i] = u[i]
        for i in range(n):
            avg[i] = avg[i] / wsum
    return best_arr, f_best, avg_arr
