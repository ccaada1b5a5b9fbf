"""Single-joint robot arm: discrete nonlinear simulator, linearisation, reference.

The continuous model ``theta'' = -(g/l) sin(theta) - c/(m l^2) theta' + tau/(m l^2)``
is used in its sampled forward-Euler form with state ``(theta, theta')``.
"""
from dataclasses import dataclass
import logging
import math

import numpy as np

from ._backend import kernels
from .errors import DimensionMismatch, NonFiniteState
from .lifted_model import StateSpaceModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RobotArmParams:
    l: float = 1.0  # arm length [m]
    m: float = 1.0  # payload mass [kg]
    c: float = 2.0  # viscous friction [N m s / rad]
    g: float = 9.81  # gravity [m / s^2]
    Ts: float = 0.005  # sampling time [s]
    u_max: float = 12.0  # torque limit [N m]

    def __post_init__(self):
        for name in ("l", "m", "c", "g", "Ts", "u_max"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class ArmState:
    x1: float  # angle [rad]
    x2: float  # angular velocity [rad / s]


def arm_step(params, x, u):
    """One sample of the discretised arm. ``u`` is applied as given (no saturation)."""
    p = params
    inertia = p.m * p.l**2
    return ArmState(
        x.x1 + p.Ts * x.x2,
        -(p.g * p.Ts / p.l) * math.sin(x.x1) + (1.0 - p.c * p.Ts / inertia) * x.x2 + (p.Ts / inertia) * u,
    )


def simulate_trial(params, u, horizon_T, t_star):
    """Output window ``y[t*..T]`` for input ``u[0..T-t*]`` starting at rest.

    Inputs past ``T - t*`` are held at zero; they cannot reach the window.
    """
    u = np.asarray(u, dtype=float)
    N = horizon_T - t_star + 1
    if u.shape != (N,):
        raise DimensionMismatch(f"u must have shape ({N},), got {u.shape}")
    if np.any(np.abs(u) > params.u_max):
        logger.warning("input exceeds torque limit %g", params.u_max)
    full = np.zeros(horizon_T)
    full[:N] = u
    theta, bad = kernels.arm_rollout(full, params.Ts, params.g, params.l, params.m, params.c)
    if bad >= 0:
        raise NonFiniteState(f"arm state became non-finite at t={bad}")
    return np.asarray(theta)[t_star:]


def linearized_model(params):
    """Jacobian of the discrete map at the hanging rest point."""
    p = params
    inertia = p.m * p.l**2
    A = [[1.0, p.Ts], [-p.g * p.Ts / p.l, 1.0 - p.c * p.Ts / inertia]]
    B = [0.0, p.Ts / inertia]
    return StateSpaceModel(A, B, [1.0, 0.0], np.zeros(2))


@dataclass(frozen=True)
class ReferenceSpec:
    horizon_T: int = 1200
    Ts: float = 0.005

    def value(self, t):
        s = self.Ts * np.asarray(t, dtype=float)
        return (np.pi / 5) * np.sin(np.pi * s / 3) + (2 * np.pi / 25) * np.sin(np.pi * s)


def reference_trajectory(spec, t_star):
    """Reference samples on the lifted output window ``t = t*..T``."""
    return spec.value(np.arange(t_star, spec.horizon_T + 1))


class NonlinearArmOracle:
    """Trial oracle that runs the nonlinear arm from rest."""

    def __init__(self, params, reference, horizon_T, t_star):
        self.params = params
        self.reference = np.asarray(reference, dtype=float)
        self.horizon_T = horizon_T
        self.t_star = t_star

    def output(self, u):
        return simulate_trial(self.params, u, self.horizon_T, self.t_star)

    def run_trial(self, u):
        return self.reference - self.output(u)
