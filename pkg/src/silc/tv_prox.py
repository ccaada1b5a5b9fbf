"""Box-constrained total-variation prox, solved through its dual.

The subproblem is

    minimize_{u in box}  lam * ||T u||_1 + 0.5 * ||u - b||^2

with ``T`` the forward-difference matrix. Writing the absolute values as a
maximum over a dual vector ``p`` with ``||p||_inf <= 1`` gives a smooth dual
whose minimiser recovers the primal point as ``clip(b - lam * L p)``, where
``L = -T^T``. The dual is minimised by a Nesterov-accelerated projected
gradient with the fixed step ``1 / (lam * 4)``; 4 bounds ``rho(L^T L)`` for
every length.
"""
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .errors import DimensionMismatch, InvalidLambda

#: Upper bound on the spectral radius of ``L^T L`` used as the step constant.
RHO_L = 4.0
#: Default threshold below which a difference counts as zero in :func:`tv_card`.
ZERO_TOL = 1e-6


@dataclass(frozen=True)
class BoxSet:
    """Componentwise interval ``[lo, hi]``; bounds may be scalars or vectors."""

    lo: float | np.ndarray = -np.inf
    hi: float | np.ndarray = np.inf

    def __post_init__(self):
        if np.any(np.asarray(self.lo) > np.asarray(self.hi)):
            raise ValueError("box needs lo <= hi componentwise")

    @classmethod
    def symmetric(cls, bound):
        return cls(-bound, bound)

    def bounds(self, n):
        """Both bounds broadcast to contiguous length-``n`` arrays."""
        lo = np.ascontiguousarray(np.broadcast_to(np.asarray(self.lo, dtype=float), (n,)))
        hi = np.ascontiguousarray(np.broadcast_to(np.asarray(self.hi, dtype=float), (n,)))
        return lo, hi

    def contains(self, x):
        x = np.asarray(x)
        return bool(np.all(x >= self.lo) and np.all(x <= self.hi))


def difference_apply(u):
    """``T u``: consecutive differences ``u[i+1] - u[i]``."""
    return np.diff(np.asarray(u, dtype=float))


def tv_norm(u):
    return float(np.abs(difference_apply(u)).sum())


def tv_card(u, zero_tol=ZERO_TOL):
    """Number of differences larger than ``zero_tol`` in magnitude."""
    if zero_tol <= 0:
        raise ValueError("zero_tol must be positive")
    return int(np.count_nonzero(np.abs(difference_apply(u)) > zero_tol))


def project_box(x, box):
    return np.clip(x, box.lo, box.hi)


def project_dual_box(x):
    x = np.asarray(x, dtype=float)
    return x / np.maximum(1.0, np.abs(x))


def apply_L(p):
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise DimensionMismatch("p must be a nonempty vector")
    out = np.zeros(p.size + 1)
    out[:-1] += p
    out[1:] -= p
    return out


def apply_L_transpose(v):
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise DimensionMismatch("v must be a vector of length >= 2")
    return v[:-1] - v[1:]


@dataclass(frozen=True)
class TVProxProblem:
    b: np.ndarray
    lam: float
    box: BoxSet = field(default_factory=BoxSet)

    def __post_init__(self):
        b = np.ascontiguousarray(self.b, dtype=float)
        if b.ndim != 1 or b.size < 2:
            raise DimensionMismatch("b must be a vector of length >= 2")
        if not self.lam >= 0:
            raise InvalidLambda(f"lambda must be nonnegative, got {self.lam}")
        object.__setattr__(self, "b", b)

    @property
    def N(self):
        return self.b.size

    def primal_objective(self, u):
        return float(self.lam * tv_norm(u) + 0.5 * np.sum((np.asarray(u) - self.b) ** 2))

    def recover(self, p):
        """Primal point associated with a dual vector."""
        return project_box(self.b - self.lam * apply_L(p), self.box)


@dataclass
class TVProxSolution:
    u: np.ndarray
    p: np.ndarray
    dual_objective_trace: np.ndarray
    iterations_used: int


def dual_objective(prob, p):
    """``||w||^2 - ||clip(w) - w||^2`` with ``w = b - lam * L p``."""
    w = prob.b - prob.lam * apply_L(p)
    r = project_box(w, prob.box) - w
    return float(np.dot(w, w) - np.dot(r, r))


def dual_gradient(prob, p):
    return -2.0 * prob.lam * apply_L_transpose(prob.recover(p))


def solve_tv_prox(prob, n_iter, early_exit=False, trace=False, exit_tol=1e-12):
    """Run ``n_iter`` accelerated projected-gradient steps on the dual.

    With ``early_exit`` the loop stops once successive dual iterates differ
    by less than ``exit_tol`` in the max norm; otherwise exactly
    ``n_iter`` steps are taken. ``lam == 0`` short-circuits to a plain
    projection.
    """
    if n_iter < 1:
        raise ValueError("n_iter must be >= 1")
    if not prob.lam >= 0:
        raise InvalidLambda(f"lambda must be nonnegative, got {prob.lam}")
    n = prob.N
    if prob.lam == 0:
        return TVProxSolution(project_box(prob.b, prob.box), np.zeros(n - 1), np.empty(0), 0)
    lo, hi = prob.box.bounds(n)
    buf = np.zeros(n_iter if trace else 0)
    p, used = kernels.tv_dual_apg(
        prob.b, float(prob.lam), lo, hi, int(n_iter), exit_tol if early_exit else 0.0, buf
    )
    return TVProxSolution(prob.recover(p), p, buf[:used], used)


def tv_prox(b, lam, box, n_iter):
    """Convenience wrapper returning only the primal point."""
    return solve_tv_prox(TVProxProblem(b, lam, box), n_iter).u
