"""End-to-end acceptance checks, one test group per criterion.

Each check prints a PASS/FAIL line; a per-criterion summary is printed at the
end of the pytest session.
"""
import time

import numpy as np
import pytest

from silc import (
    BoxSet,
    LinearModelOracle,
    NonFiniteIterate,
    RobotArmParams,
    SolverConfig,
    StateSpaceModel,
    TVProxProblem,
    apply_L,
    apply_L_transpose,
    build_lifted,
    composite_objective,
    dual_gradient,
    dual_objective,
    ReferenceSpec,
    learning_gain,
    linearized_model,
    reference_trajectory,
    run_silc,
    solve_tv_prox,
)
from silc import reference
from silc.harness import ExperimentConfig, build_setup, run_experiment

PROX = "Prox oracle equivalence"
TWO_POINT = "Two-point closed form"
DUAL = "Dual gradient and Lipschitz bound"
MONO = "Monotone objective of gradient S-ILC"
CONTRACT = "Contraction of plain gradient ILC"
ACCEL = "Acceleration"
SWEEP = "Robot arm lambda sweep"
HEAVY = "Heavy-ball momentum"
DETERMINISM = "Determinism"

SCALAR = StateSpaceModel(0.5, 1.0, 1.0)


def scalar_instance():
    lm = build_lifted(SCALAR, 50)
    r = np.sin(2 * np.pi * np.arange(lm.N) / 25) + 0.5
    return lm, r


@pytest.fixture(scope="module")
def arm():
    lm = build_lifted(linearized_model(RobotArmParams()), 1200)
    r = reference_trajectory(ReferenceSpec(), lm.t_star)
    _, rho = learning_gain(lm)
    return lm, r, rho


def test_prox_oracle_equivalence(criterion):
    c = criterion(PROX)
    rng = np.random.default_rng(0)
    box = BoxSet(-1.0, 1.0)
    lams = (0.01, 0.1, 1.0, 10.0)
    worst, worst_enum = 0.0, 0.0
    start = time.perf_counter()
    for i in range(200):
        n = int(rng.integers(2, 9))
        b = rng.uniform(-3.0, 3.0, n)
        lam = lams[i % 4]
        u = solve_tv_prox(TVProxProblem(b, lam, box), 5000).u
        f = reference.primal_objective(u, b, lam)
        _, f_sub = reference.subgradient_tv(b, lam, box)
        _, f_enum = reference.enumerate_tv(b, lam, box)
        worst = max(worst, abs(f - f_sub))
        worst_enum = max(worst_enum, abs(f - f_enum))
    elapsed = time.perf_counter() - start
    c.check("gap vs projected subgradient < 1e-6", worst < 1e-6, f"(max {worst:.2e})")
    c.check("gap vs exact enumeration < 1e-6", worst_enum < 1e-6, f"(max {worst_enum:.2e})")
    c.check("runtime < 60 s", elapsed < 60, f"({elapsed:.1f} s incl. oracles)")


def test_two_point_closed_form(criterion):
    c = criterion(TWO_POINT)
    u = solve_tv_prox(TVProxProblem([3.0, 1.0], 0.5, BoxSet()), 5000).u
    err = np.max(np.abs(u - [2.5, 1.5]))
    c.check("u = (2.5, 1.5) within 1e-8", err < 1e-8, f"(err {err:.1e})")


def test_dual_gradient_and_bound(criterion):
    c = criterion(DUAL)
    rng = np.random.default_rng(1)
    h = 1e-6
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(3, 12))
        prob = TVProxProblem(rng.uniform(-3, 3, n), float(rng.uniform(0.1, 2)), BoxSet(-1.0, 1.0))
        p = rng.uniform(-0.9, 0.9, n - 1)  # interior of the dual box
        fd = np.array(
            [(dual_objective(prob, p + h * e) - dual_objective(prob, p - h * e)) / (2 * h) for e in np.eye(n - 1)]
        )
        worst = max(worst, np.max(np.abs(dual_gradient(prob, p) - fd)))
    c.check("gradient vs central differences within 1e-4 at 100 points", worst < 1e-4, f"(max {worst:.1e})")

    top = 0.0
    for n in range(2, 65):
        M = np.column_stack([apply_L_transpose(apply_L(e)) for e in np.eye(n - 1)])
        top = max(top, np.linalg.eigvalsh(M).max())
    c.check("rho(L^T L) <= 4 for N = 2..64", top <= 4.0, f"(max {top:.6f})")


def test_monotone_objective(criterion, arm):
    c = criterion(MONO)
    lm, r, rho = arm
    cfg = SolverConfig(variant="gradient_silc", lam=0.5 * rho, n_trials=50, inner_iters=2000, box=BoxSet.symmetric(12))
    F = np.array([x.objective_F for x in run_silc(cfg, lm, LinearModelOracle(lm, r))])
    worst = np.max(np.diff(F))
    c.check("F(u_k+1) <= F(u_k) + 1e-8 over 50 trials", worst <= 1e-8, f"(max step {worst:+.2e})")


def test_plain_gradient_contraction(criterion):
    c = criterion(CONTRACT)
    lm, r = scalar_instance()
    gamma, _ = learning_gain(lm)
    G = lm.dense()
    q = np.linalg.norm(np.eye(lm.N) - gamma * G @ G.T, 2)
    cfg = SolverConfig(variant="plain_gradient", gamma=gamma, n_trials=200)
    # e_0 = 0 by convention, so the first measured error is e_1 = r
    norms = np.array([x.error_norm for x in run_silc(cfg, lm, LinearModelOracle(lm, r))])
    ratios = norms[1:] / norms[:-1]
    c.check("||e_k+1|| / ||e_k|| <= ||I - gGG^T|| + 1e-10", np.all(ratios <= q + 1e-10), f"(max {ratios.max():.6f}, bound {q:.6f})")
    c.check("linear decay over 200 trials", norms[-1] <= q**199 * norms[0] * (1 + 1e-6) and norms[-1] < 1e-6 * norms[0],
            f"(||e_200||/||e_1|| = {norms[-1] / norms[0]:.2e})")


def test_acceleration(criterion):
    cp = pytest.importorskip("cvxpy")
    c = criterion(ACCEL)
    lm, r = scalar_instance()
    _, rho = learning_gain(lm)
    lam, bound = 0.1 * rho, 5.0
    x = cp.Variable(lm.N)
    cp.Problem(
        cp.Minimize(0.5 * cp.sum_squares(lm.dense() @ x - r) + lam * cp.norm1(cp.diff(x))), [cp.abs(x) <= bound]
    ).solve(solver=cp.CLARABEL, tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12)
    f_star = composite_objective(lm, r, np.clip(x.value, -bound, bound), lam)

    curves, hits = {}, {}
    for v in ("gradient_silc", "accelerated_silc"):
        cfg = SolverConfig(variant=v, lam=lam, n_trials=50, inner_iters=2000, box=BoxSet.symmetric(bound))
        F = np.array([rec.objective_F for rec in run_silc(cfg, lm, LinearModelOracle(lm, r))])
        curves[v] = F
        hit = np.flatnonzero(F <= f_star + 1e-3)
        hits[v] = int(hit[0]) + 1 if hit.size else np.inf
    c.check("min F accelerated <= min F gradient", curves["accelerated_silc"].min() <= curves["gradient_silc"].min(),
            f"({curves['accelerated_silc'].min() - f_star:.1e} vs {curves['gradient_silc'].min() - f_star:.1e} above F*)")
    c.check("reaches F* + 1e-3 in strictly fewer trials", hits["accelerated_silc"] < hits["gradient_silc"],
            f"({hits['accelerated_silc']} vs {hits['gradient_silc']})")


# published (||r - Gu||_2, ||Tu||_1, ||Tu||_0) per lambda/rho, for side-by-side reporting
SWEEP_TARGETS = {0.0: (1.0694, 42.4495, 1155), 0.5: (1.0845, 38.0014, 799), 2.5: (1.1406, 34.5145, 754), 5.0: (1.2117, 33.0654, 463)}


@pytest.fixture(scope="module")
def arm_sweep(tmp_path_factory):
    cfg = ExperimentConfig.from_dict(
        {
            "plant": "robot_arm",
            "variants": ["accelerated_silc"],
            "lambda_ratios": [0, 0.5, 2.5, 5],
            "N1": 50,
            "N2": 2000,
            "zero_tol": 1e-3,
        }
    )
    start = time.perf_counter()
    code, rows = run_experiment(cfg, tmp_path_factory.mktemp("sweep"), summary=True)
    elapsed = time.perf_counter() - start
    rows = sorted(rows, key=lambda r: r["lambda"])
    print("\nlambda/rho  ||r-Gu||_2 (target)   ||Tu||_1 (target)   ||Tu||_0 (target)")
    for row in rows:
        e, t1, t0 = SWEEP_TARGETS[row["lambda_ratio"]]
        print(
            f"{row['lambda_ratio']:10g}  {row['model_error_norm']:8.4f} ({e:.4f})"
            f"  {row['tv_l1']:7.3f} ({t1:7.3f})  {row['tv_l0']:6d} ({t0:4d})"
        )
    return code, rows, elapsed


class TestArmSweep:
    def test_runs_cleanly_and_fast(self, criterion, arm_sweep):
        code, rows, elapsed = arm_sweep
        c = criterion(SWEEP)
        c.check("sweep exits 0", code == 0 and all(r["status"] == "ok" for r in rows))
        c.check("sweep runtime < 10 min", elapsed < 600, f"({elapsed:.1f} s)")

    def test_trends(self, criterion, arm_sweep):
        _, rows, _ = arm_sweep
        c = criterion(SWEEP)
        err = np.array([r["model_error_norm"] for r in rows])
        tv1 = np.array([r["tv_l1"] for r in rows])
        tv0 = np.array([r["tv_l0"] for r in rows])
        c.check("||r - Gu||_2 nondecreasing", np.all(np.diff(err) >= 0), f"({np.round(err, 4).tolist()})")
        c.check("||Tu||_1 nonincreasing", np.all(np.diff(tv1) <= 0), f"({np.round(tv1, 3).tolist()})")
        c.check("||Tu||_0 nonincreasing", np.all(np.diff(tv0) <= 0), f"({tv0.tolist()})")

    def test_error_at_zero_lambda(self, criterion, arm_sweep):
        row = arm_sweep[1][0]
        rel = abs(row["model_error_norm"] / 1.0694 - 1)
        criterion(SWEEP).check("lambda=0 error within 10% of 1.0694", rel <= 0.10, f"({row['model_error_norm']:.4f}, {rel:.1%})")

    def test_error_at_largest_lambda(self, criterion, arm_sweep):
        row = arm_sweep[1][-1]
        rel = abs(row["model_error_norm"] / 1.2117 - 1)
        criterion(SWEEP).check("lambda=5rho error within 10% of 1.2117", rel <= 0.10, f"({row['model_error_norm']:.4f}, {rel:.1%})")

    def test_tv_at_largest_lambda(self, criterion, arm_sweep):
        row = arm_sweep[1][-1]
        rel = abs(row["tv_l1"] / 33.0654 - 1)
        criterion(SWEEP).check("lambda=5rho ||Tu||_1 within 15% of 33.0654", rel <= 0.15, f"({row['tv_l1']:.3f}, {rel:.1%})")


def test_heavy_ball(criterion, arm):
    c = criterion(HEAVY)
    lm, r, rho = arm
    box = BoxSet.symmetric(12)
    common = dict(lam=0.5 * rho, n_trials=50, inner_iters=2000, box=box)
    setup = build_setup(ExperimentConfig.from_dict({"variants": ["heavy_ball"], "beta": 0.4}))
    try:
        recs = run_silc(SolverConfig(variant="heavy_ball", beta=0.4, **common), setup.lm, setup.oracle)
        ok = len(recs) == 50 and np.isfinite(recs[-1].error_norm) and recs[-1].error_norm < recs[0].error_norm
        detail = f"(||e_1|| = {recs[0].error_norm:.3f} -> ||e_50|| = {recs[-1].error_norm:.3f})"
    except NonFiniteIterate as exc:
        ok, detail = False, f"({exc})"
    c.check("converges on the nonlinear arm with beta = 0.4", ok, detail)

    oracle = LinearModelOracle(lm, r)
    f_hb = run_silc(SolverConfig(variant="heavy_ball", beta=0.4, **common), lm, oracle)[-1].objective_F
    f_gr = run_silc(SolverConfig(variant="gradient_silc", **common), lm, oracle)[-1].objective_F
    c.check("final F <= gradient final F on the linear instance", f_hb <= f_gr, f"({f_hb:.6f} vs {f_gr:.6f})")


def test_determinism(criterion, tmp_path):
    c = criterion(DETERMINISM)
    raw = {
        "variants": ["gradient_silc", "accelerated_silc", "heavy_ball", "plain_gradient"],
        "lambda_ratios": [0, 2.5],
        "N1": 10,
        "N2": 300,
    }
    outs = []
    for name in ("a", "b"):
        run_experiment(ExperimentConfig.from_dict(raw), tmp_path / name, summary=True)
        root = tmp_path / name
        outs.append({p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*.csv"))})
    c.check("identical runs give bitwise-identical CSVs", outs[0] == outs[1] and len(outs[0]) == 8 * 3 + 1,
            f"({len(outs[0])} files)")
