"""Outer-loop learning updates: plain gradient ILC and its sparse variants.

Every sparse variant forms a prox centre ``b_k`` from the previous inputs
and errors, then takes ``u_k = prox(b_k)`` for the TV-plus-box term with
weight ``gamma * lam``. The variants differ only in how ``b_k`` is built.
"""
from dataclasses import dataclass, field
from enum import Enum
import math
from typing import Protocol

import numpy as np

from .errors import NonFiniteIterate, NonFiniteState
from .lifted_model import _as_signal, apply_G, apply_G_transpose, learning_gain
from .tv_prox import ZERO_TOL, BoxSet, tv_card, tv_norm, tv_prox


class Variant(str, Enum):
    PLAIN_GRADIENT = "plain_gradient"
    GRADIENT_SILC = "gradient_silc"
    ACCELERATED_SILC = "accelerated_silc"
    HEAVY_BALL = "heavy_ball"


class TrialOracle(Protocol):
    reference: np.ndarray

    def run_trial(self, u: np.ndarray) -> np.ndarray:
        """Apply ``u`` from the fixed initial state and return ``r - y``."""


class LinearModelOracle:
    """Trial oracle that is the lifted model itself: ``e = r - G u - d``."""

    def __init__(self, lm, reference):
        self.lm = lm
        self.reference = np.asarray(reference, dtype=float)

    def output(self, u):
        return apply_G(self.lm, u) + self.lm.d

    def run_trial(self, u):
        return self.reference - self.output(u)


@dataclass
class SolverConfig:
    variant: Variant = Variant.GRADIENT_SILC
    lam: float = 0.0
    gamma: float | str = "auto"
    n_trials: int = 50
    inner_iters: int = 200
    beta: float = 0.4
    box: BoxSet = field(default_factory=BoxSet)
    zero_tol: float = ZERO_TOL
    warm_start_trial: bool = False
    gain_safety: float = 1.01

    def __post_init__(self):
        self.variant = Variant(self.variant)
        if not self.lam >= 0:
            raise ValueError("lam must be nonnegative")
        if self.gamma != "auto" and not float(self.gamma) > 0:
            raise ValueError("gamma must be positive or 'auto'")
        if not 0 <= self.beta < 1:
            raise ValueError("beta must lie in [0, 1)")
        if self.n_trials < 1 or self.inner_iters < 1:
            raise ValueError("n_trials and inner_iters must be >= 1")

    def resolve_gamma(self, lm):
        if self.gamma == "auto":
            return learning_gain(lm, safety=self.gain_safety)[0]
        return float(self.gamma)


@dataclass
class TrialRecord:
    k: int
    u: np.ndarray = field(repr=False)
    e: np.ndarray = field(repr=False)
    error_norm: float
    objective_F: float
    tv_l1: float
    tv_l0: int
    model_error_norm: float


def composite_objective(lm, r, u, lam):
    """``0.5 ||G u + d - r||^2 + lam ||T u||_1`` on the lifted model."""
    res = apply_G(lm, u) + lm.d - _as_signal(lm, r, "r")
    return 0.5 * float(np.dot(res, res)) + lam * tv_norm(u)


def plain_gradient_step(u, e, gamma, lm):
    return np.asarray(u, dtype=float) + gamma * apply_G_transpose(lm, e)


def momentum_sequence(k):
    """``(t_k, tau_k)`` for the accelerated outer loop, with ``t_0 = 0``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    t_prev = 0.0
    for _ in range(k):
        t = 0.5 + 0.5 * math.sqrt(1.0 + 4.0 * t_prev * t_prev)
        tau = (t_prev - 1.0) / t
        t_prev = t
    return t, tau


def _record(k, u, e, lm, r, lam, zero_tol):
    res = apply_G(lm, u) + lm.d - r
    tv = tv_norm(u)
    return TrialRecord(
        k=k,
        u=u,
        e=e,
        error_norm=float(np.linalg.norm(e)),
        objective_F=0.5 * float(np.dot(res, res)) + lam * tv,
        tv_l1=tv,
        tv_l0=tv_card(u, zero_tol),
        model_error_norm=float(np.linalg.norm(res)),
    )


def run_silc(cfg, lm, oracle, gamma=None):
    """Run ``cfg.n_trials`` learning trials and return one record per trial.

    ``objective_F`` is always measured on the lifted model, whatever plant
    the oracle simulates. A non-finite input aborts the run with
    :class:`NonFiniteIterate` carrying the records gathered so far.
    """
    if gamma is None:
        gamma = cfg.resolve_gamma(lm)
    r = oracle.reference
    N = lm.N
    if r.shape != (N,):
        raise ValueError(f"oracle reference has shape {r.shape}, model expects ({N},)")
    weight = gamma * cfg.lam
    variant = cfg.variant

    u = np.zeros(N)
    u_prev = np.zeros(N)
    e = np.zeros(N)
    e_prev = np.zeros(N)
    t_prev = 0.0
    records = []
    if cfg.warm_start_trial:
        e = oracle.run_trial(u)
        e_prev = e.copy()
        records.append(_record(0, u, e, lm, r, cfg.lam, cfg.zero_tol))

    for k in range(1, cfg.n_trials + 1):
        if variant is Variant.PLAIN_GRADIENT:
            u_new = plain_gradient_step(u, e, gamma, lm)
        else:
            if variant is Variant.ACCELERATED_SILC:
                t = 0.5 + 0.5 * math.sqrt(1.0 + 4.0 * t_prev * t_prev)
                tau = (t_prev - 1.0) / t
                t_prev = t
                b = u + tau * (u - u_prev) + gamma * apply_G_transpose(lm, e + tau * (e - e_prev))
            else:
                b = u + gamma * apply_G_transpose(lm, e)
                if variant is Variant.HEAVY_BALL:
                    b = b + cfg.beta * (u - u_prev)
            if not np.all(np.isfinite(b)):
                raise NonFiniteIterate(k, records)
            u_new = tv_prox(b, weight, cfg.box, cfg.inner_iters)
        if not np.all(np.isfinite(u_new)):
            raise NonFiniteIterate(k, records)
        u_prev, u = u, u_new
        try:
            e_new = oracle.run_trial(u)
        except NonFiniteState as exc:
            exc.records = records
            raise
        e_prev, e = e, e_new
        records.append(_record(k, u, e, lm, r, cfg.lam, cfg.zero_tol))
    return records
