"""Experiment runner: JSON config in, per-run CSV artifacts and a manifest out."""
from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
import json
import logging
from pathlib import Path

import numpy as np

from . import __version__, _backend
from .errors import ConfigError, NonFiniteIterate, NonFiniteState
from .lifted_model import StateSpaceModel, build_lifted, learning_gain
from .plant import (
    NonlinearArmOracle,
    ReferenceSpec,
    RobotArmParams,
    linearized_model,
    reference_trajectory,
)
from .solvers import LinearModelOracle, SolverConfig, Variant, run_silc
from .tv_prox import ZERO_TOL, BoxSet

logger = logging.getLogger(__name__)

TRIALS_COLUMNS = ("k", "error_norm", "objective_F", "tv_l1", "tv_l0")
SUMMARY_COLUMNS = (
    "variant",
    "lambda_ratio",
    "lambda",
    "k",
    "model_error_norm",
    "error_norm",
    "tv_l1",
    "tv_l0",
    "zero_tol",
    "status",
)

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_BENCH = 0, 2, 3, 4


def fmt(x):
    """17 significant digits: enough to round-trip any double."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


@dataclass
class ExperimentConfig:
    plant: str = "robot_arm"
    params: RobotArmParams = field(default_factory=RobotArmParams)
    horizon_s: float = 6.0
    horizon_T: int | None = None
    model: dict | None = None
    reference: str | list = "arm"
    variants: list = field(default_factory=lambda: ["gradient_silc"])
    lambda_ratios: list = field(default_factory=lambda: [0.0])
    lambdas: list | None = None
    N1: int = 50
    N2: int = 200
    beta: float = 0.4
    box: dict | None = None
    zero_tol: float = ZERO_TOL
    gamma: float | str = "auto"
    gain_safety: float = 1.01
    warm_start_trial: bool = False
    output_dir: str = "runs"

    @classmethod
    def from_dict(cls, raw):
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        raw = dict(raw.get("config", raw))  # a manifest is accepted as a config
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            if "params" in raw:
                raw["params"] = RobotArmParams(**raw["params"])
            cfg = cls(**raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        cfg.validate()
        return cfg

    def validate(self):
        if self.plant not in ("robot_arm", "linear"):
            raise ConfigError(f"plant must be 'robot_arm' or 'linear', got {self.plant!r}")
        try:
            [Variant(v) for v in self.variants]
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if not self.variants:
            raise ConfigError("at least one variant is required")
        if not self.lambda_ratios or any(not float(x) >= 0 for x in self.lambda_ratios):
            raise ConfigError("lambda_ratios must be a nonempty list of nonnegative numbers")
        if self.lambdas is not None and (
            len(self.lambdas) != len(self.lambda_ratios) or any(not float(x) >= 0 for x in self.lambdas)
        ):
            raise ConfigError("lambdas must match lambda_ratios in length and be nonnegative")
        if int(self.N1) < 1 or int(self.N2) < 1:
            raise ConfigError("N1 and N2 must be >= 1")
        if not 0 <= self.beta < 1:
            raise ConfigError("beta must lie in [0, 1)")
        if not self.zero_tol > 0:
            raise ConfigError("zero_tol must be positive")
        if self.gamma != "auto" and not (isinstance(self.gamma, (int, float)) and self.gamma > 0):
            raise ConfigError("gamma must be 'auto' or a positive number")
        if self.plant == "robot_arm" and self.model is not None:
            raise ConfigError("'model' only applies to the linear plant")
        if not (self.reference in ("arm", "zero") or isinstance(self.reference, list)):
            raise ConfigError("reference must be 'arm', 'zero' or a list of samples")
        box = self.resolved_box()
        if np.any(np.asarray(box.lo) > np.asarray(box.hi)):
            raise ConfigError("box needs lo <= hi")

    def resolved_horizon(self):
        if self.horizon_T is not None:
            return int(self.horizon_T)
        return int(round(self.horizon_s / self.params.Ts))

    def resolved_box(self):
        if self.box is None:
            return BoxSet.symmetric(self.params.u_max)
        try:
            return BoxSet(float(self.box["lo"]), float(self.box["hi"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"box must be {{'lo': x, 'hi': y}}: {exc}") from exc

    def to_dict(self):
        out = asdict(self)
        out["params"] = asdict(self.params)
        return out


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return ExperimentConfig.from_dict(raw)


@dataclass
class Setup:
    """Everything a run needs that is derived from the config."""

    lm: object
    oracle: object
    reference: np.ndarray
    rho: float
    gamma: float


def build_setup(cfg):
    T = cfg.resolved_horizon()
    if cfg.plant == "linear" and cfg.model is not None:
        try:
            ss = StateSpaceModel(**cfg.model)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad linear model: {exc}") from exc
    else:
        ss = linearized_model(cfg.params)
    try:
        lm = build_lifted(ss, T)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.reference == "arm":
        r = reference_trajectory(ReferenceSpec(T, cfg.params.Ts), lm.t_star)
    elif cfg.reference == "zero":
        r = np.zeros(lm.N)
    else:
        r = np.asarray(cfg.reference, dtype=float)
        if r.shape != (lm.N,):
            raise ConfigError(f"reference needs {lm.N} samples, got {r.size}")
    if cfg.plant == "robot_arm":
        oracle = NonlinearArmOracle(cfg.params, r, T, lm.t_star)
    else:
        oracle = LinearModelOracle(lm, r)
    gamma, rho = learning_gain(lm, safety=cfg.gain_safety)
    if cfg.gamma != "auto":
        gamma = float(cfg.gamma)
    return Setup(lm, oracle, r, rho, gamma)


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) for x in row])


def run_dir_name(variant, index, ratio):
    return f"{variant}__{index:02d}_ratio_{fmt(float(ratio))}"


def _execute(cfg, setup, variant, index, out_root):
    """One (variant, lambda) run; writes its directory and returns a summary row."""
    ratio = float(cfg.lambda_ratios[index])
    lam = float(cfg.lambdas[index]) if cfg.lambdas is not None else ratio * setup.rho
    scfg = SolverConfig(
        variant=variant,
        lam=lam,
        gamma=setup.gamma,
        n_trials=int(cfg.N1),
        inner_iters=int(cfg.N2),
        beta=cfg.beta,
        box=cfg.resolved_box(),
        zero_tol=cfg.zero_tol,
        warm_start_trial=cfg.warm_start_trial,
    )
    status = "ok"
    try:
        records = run_silc(scfg, setup.lm, setup.oracle, gamma=setup.gamma)
    except (NonFiniteIterate, NonFiniteState) as exc:
        logger.error("%s lambda=%g diverged: %s", variant, lam, exc)
        records = getattr(exc, "records", [])
        status = "diverged"

    run_dir = out_root / run_dir_name(variant, index, ratio)
    run_dir.mkdir(parents=True, exist_ok=True)
    _write_csv(
        run_dir / "trials.csv",
        TRIALS_COLUMNS,
        [(r.k, r.error_norm, r.objective_F, r.tv_l1, r.tv_l0) for r in records],
    )
    row = {"variant": variant, "lambda_ratio": ratio, "lambda": lam, "status": status, "zero_tol": cfg.zero_tol}
    if records:
        last = records[-1]
        lm = setup.lm
        t_in = np.arange(lm.N)
        t_out = np.arange(lm.t_star, lm.horizon_T + 1)
        _write_csv(run_dir / "input.csv", ("t", "u"), zip(t_in, last.u))
        _write_csv(run_dir / "output.csv", ("t", "r", "y"), zip(t_out, setup.reference, setup.reference - last.e))
        row.update(
            k=last.k,
            model_error_norm=last.model_error_norm,
            error_norm=last.error_norm,
            tv_l1=last.tv_l1,
            tv_l0=last.tv_l0,
        )
    return row


def _execute_star(args):
    return _execute(*args)


def trend_report(rows):
    """Monotone-trend flags over rows sorted by lambda (per variant)."""
    report = {}
    for variant in dict.fromkeys(r["variant"] for r in rows):
        sel = sorted((r for r in rows if r["variant"] == variant and "tv_l1" in r), key=lambda r: r["lambda"])
        err = [r["model_error_norm"] for r in sel]
        tv1 = [r["tv_l1"] for r in sel]
        tv0 = [r["tv_l0"] for r in sel]
        report[variant] = {
            "model_error_norm_nondecreasing": bool(np.all(np.diff(err) >= 0)),
            "tv_l1_nonincreasing": bool(np.all(np.diff(tv1) <= 0)),
            "tv_l0_nonincreasing": bool(np.all(np.diff(tv0) <= 0)),
        }
    return report


def run_experiment(cfg, output_dir=None, jobs=1, summary=False):
    """Execute every (variant, lambda) pair; returns ``(exit_code, rows)``."""
    out_root = Path(output_dir if output_dir is not None else cfg.output_dir)
    out_root.mkdir(parents=True, exist_ok=True)
    started = datetime.now(timezone.utc).isoformat()
    setup = build_setup(cfg)
    tasks = [(cfg, setup, v, i, out_root) for v in cfg.variants for i in range(len(cfg.lambda_ratios))]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_execute_star, tasks))
    else:
        rows = [_execute(*t) for t in tasks]

    trends = trend_report(rows)
    if summary:
        _write_csv(out_root / "summary.csv", SUMMARY_COLUMNS, [[r.get(c, "") for c in SUMMARY_COLUMNS] for r in rows])
        for variant, flags in trends.items():
            print(f"{variant}: " + ", ".join(f"{k}={'yes' if v else 'NO'}" for k, v in flags.items()))

    manifest = {
        "config": cfg.to_dict(),
        "resolved": {
            "rho_GtG": setup.rho,
            "gamma": setup.gamma,
            "t_star": setup.lm.t_star,
            "N": setup.lm.N,
            "horizon_T": setup.lm.horizon_T,
        },
        "runs": [
            {
                "variant": r["variant"],
                "lambda_ratio": r["lambda_ratio"],
                "lambda": r["lambda"],
                "status": r["status"],
                "dir": run_dir_name(r["variant"], i % len(cfg.lambda_ratios), r["lambda_ratio"]),
            }
            for i, r in enumerate(rows)
        ],
        "trends": trends,
        "version": __version__,
        "backend": _backend.NAME,
        "started": started,
        "finished": datetime.now(timezone.utc).isoformat(),
    }
    with open(out_root / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
    code = EXIT_DIVERGED if any(r["status"] != "ok" for r in rows) else EXIT_OK
    return code, rows
