"""Lifted (finite-horizon) description of a SISO LTI plant.

Over a trial of length ``T`` the plant maps the input vector
``u = (u[0], ..., u[T - t*])`` to the output vector
``y = (y[t*], ..., y[T])`` through ``y = G u + d``. ``G`` is lower
triangular Toeplitz, so it is carried around as its first column (the
Markov parameters starting at ``C A^(t*-1) B``) and applied by direct
convolution.
"""
from dataclasses import dataclass, field
import logging

import numpy as np

from ._backend import kernels
from .errors import DimensionMismatch, NoRelativeDegree, NotConverged

logger = logging.getLogger(__name__)

#: Largest system :func:`solve_lifted` will invert directly.
MAX_DIRECT_SOLVE = 2048


@dataclass(frozen=True)
class StateSpaceModel:
    """Discrete SISO plant ``x[t+1] = A x[t] + B u[t]``, ``y[t] = C x[t]``."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    x0: np.ndarray = None

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        n = A.shape[0]
        if A.shape != (n, n):
            raise DimensionMismatch(f"A must be square, got {A.shape}")
        B = np.asarray(self.B, dtype=float).reshape(-1)
        C = np.asarray(self.C, dtype=float).reshape(-1)
        if B.size != n:
            raise DimensionMismatch(f"B must be a single column of length {n}, got {np.shape(self.B)}")
        if C.size != n:
            raise DimensionMismatch(f"C must be a single row of length {n}, got {np.shape(self.C)}")
        x0 = np.zeros(n) if self.x0 is None else np.asarray(self.x0, dtype=float).reshape(-1)
        if x0.size != n:
            raise DimensionMismatch(f"x0 must have length {n}, got {x0.size}")
        for name, arr in (("A", A), ("B", B), ("C", C), ("x0", x0)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def order(self):
        return self.A.shape[0]


@dataclass(frozen=True)
class LiftedModel:
    """Matrix-free ``G`` and free response ``d`` over one trial."""

    markov: np.ndarray
    t_star: int
    horizon_T: int
    d: np.ndarray = field(repr=False)

    def __post_init__(self):
        markov = np.ascontiguousarray(self.markov, dtype=float)
        d = np.ascontiguousarray(self.d, dtype=float)
        if self.N != markov.shape[0] or d.shape != markov.shape:
            raise DimensionMismatch(
                f"expected {self.N} Markov parameters and offsets, got {markov.shape[0]} and {d.shape[0]}"
            )
        markov.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "markov", markov)
        object.__setattr__(self, "d", d)

    @property
    def N(self):
        return self.horizon_T - self.t_star + 1

    def dense(self):
        """Explicit ``G``. Only meant for small diagnostics and tests."""
        G = np.zeros((self.N, self.N))
        for k in range(self.N):
            G[np.arange(k, self.N), np.arange(self.N - k)] = self.markov[k]
        return G


def relative_degree(ss, t_max=None, tol=1e-12):
    """Smallest ``t >= 1`` with ``|C A^(t-1) B| > tol``.

    ``t_max`` defaults to the state dimension: past that, Cayley-Hamilton
    makes every later Markov parameter vanish as well.
    """
    if t_max is None:
        t_max = ss.order
    if t_max < 1 or tol <= 0:
        raise ValueError("need t_max >= 1 and tol > 0")
    v = ss.B.copy()
    for t in range(1, t_max + 1):
        if abs(ss.C @ v) > tol:
            return t
        v = ss.A @ v
    raise NoRelativeDegree(f"all Markov parameters up to t={t_max} are below {tol:g}")


def build_lifted(ss, horizon_T, t_max=None, tol=1e-12):
    t_star = relative_degree(ss, t_max=t_max, tol=tol)
    if horizon_T <= t_star:
        raise ValueError(f"horizon {horizon_T} must exceed relative degree {t_star}")
    N = horizon_T - t_star + 1
    markov = np.empty(N)
    d = np.empty(N)
    v = np.linalg.matrix_power(ss.A, t_star - 1) @ ss.B
    x = np.linalg.matrix_power(ss.A, t_star) @ ss.x0
    for j in range(N):
        markov[j] = ss.C @ v
        d[j] = ss.C @ x
        v = ss.A @ v
        x = ss.A @ x
    return LiftedModel(markov=markov, t_star=t_star, horizon_T=horizon_T, d=d)


def _as_signal(lm, v, name):
    v = np.ascontiguousarray(v, dtype=float)
    if v.shape != (lm.N,):
        raise DimensionMismatch(f"{name} must have shape ({lm.N},), got {v.shape}")
    return v


def apply_G(lm, u):
    """``G u`` by lower-triangular Toeplitz convolution."""
    return kernels.toeplitz_apply(lm.markov, _as_signal(lm, u, "u"))


def apply_G_transpose(lm, e):
    """``G^T e`` (the correlation that drives the gradient ILC update)."""
    return kernels.toeplitz_apply_t(lm.markov, _as_signal(lm, e, "e"))


def spectral_radius_GtG(lm, tol=1e-10, max_iter=5000):
    """Power iteration for the largest eigenvalue of ``G^T G``.

    Starts from the normalised all-ones vector. The returned Rayleigh
    quotient approaches the true value from below. On failure to settle,
    :class:`NotConverged` carries the last estimate.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    v = np.full(lm.N, 1.0 / np.sqrt(lm.N))
    est = 0.0
    for _ in range(max_iter):
        Gv = apply_G(lm, v)
        new = float(np.dot(Gv, Gv))
        w = apply_G_transpose(lm, Gv)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
        if est > 0.0 and abs(new - est) < tol * new:
            return new
        est = new
    raise NotConverged(max_iter, est)


def learning_gain(lm, safety=1.01, tol=1e-10, max_iter=5000):
    """``1 / (safety * rho(G^T G))``; also returns the raw estimate.

    A non-converged power iteration still yields a usable lower estimate;
    it is accepted with a warning.
    """
    try:
        rho = spectral_radius_GtG(lm, tol=tol, max_iter=max_iter)
    except NotConverged as exc:
        logger.warning("%s; using last estimate", exc)
        rho = exc.estimate
    return 1.0 / (safety * rho), rho


def solve_lifted(lm, r):
    """Exact tracking input ``G^{-1}(r - d)`` by forward substitution.

    Diagnostic only, limited to ``N <= MAX_DIRECT_SOLVE``.
    """
    if lm.N > MAX_DIRECT_SOLVE:
        raise ValueError(f"direct inversion limited to N <= {MAX_DIRECT_SOLVE}")
    rhs = _as_signal(lm, r, "r") - lm.d
    m = lm.markov
    u = np.zeros(lm.N)
    for i in range(lm.N):
        u[i] = (rhs[i] - np.dot(m[i:0:-1], u[:i])) / m[0]
    return u
