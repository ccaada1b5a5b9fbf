"""Sparsity-promoting iterative learning control.

Gradient and accelerated ILC whose input update is a box-constrained
total-variation prox, solved through its dual.
"""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0+unknown"

from ._backend import NAME as BACKEND
from .errors import (
    DimensionMismatch,
    InvalidLambda,
    NoRelativeDegree,
    NonFiniteIterate,
    NonFiniteState,
    NotConverged,
)
from .lifted_model import (
    LiftedModel,
    StateSpaceModel,
    apply_G,
    apply_G_transpose,
    build_lifted,
    learning_gain,
    relative_degree,
    solve_lifted,
    spectral_radius_GtG,
)
from .plant import (
    ArmState,
    NonlinearArmOracle,
    ReferenceSpec,
    RobotArmParams,
    arm_step,
    linearized_model,
    reference_trajectory,
    simulate_trial,
)
from .solvers import (
    LinearModelOracle,
    SolverConfig,
    TrialRecord,
    Variant,
    composite_objective,
    momentum_sequence,
    plain_gradient_step,
    run_silc,
)
from .tv_prox import (
    BoxSet,
    TVProxProblem,
    TVProxSolution,
    apply_L,
    apply_L_transpose,
    difference_apply,
    dual_gradient,
    dual_objective,
    project_box,
    project_dual_box,
    solve_tv_prox,
    tv_card,
    tv_norm,
)
