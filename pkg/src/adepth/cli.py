"""Command-line front end: run scenarios, compare strategies, self-test.

Scenario files are flat INI-style key/value text (see scenarios/fig1.cfg
for the full vocabulary).  Exit codes are a stable contract:

    0  success
    1  selftest failure
    2  configuration error (missing/invalid file, empty strategy list)
    3  runtime simulation error
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import os
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import allocation, geometry, observer
from .controllers import STRATEGIES
from .errors import AdepthError, ConfigError
from .geometry import CameraTwist
from .observer import EstimatorState, ObserverGains
from .simulation import (
    ScenarioConfig,
    SimLog,
    depth_convergence_time,
    run_scenario,
    tracking_convergence_time,
)

__all__ = [
    "ComparisonSpec",
    "load_config",
    "save_config",
    "cmd_run",
    "cmd_compare",
    "cmd_selftest",
    "main",
]

log = logging.getLogger(__name__)

_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}

# Depth error is "converged" below this fraction of its initial value.
CONVERGENCE_FRACTION = 0.05
TRACKING_THRESHOLD = 0.01


@dataclass
class ComparisonSpec:
    """Shared initial conditions, the strategies to run, and where output goes."""

    base: ScenarioConfig
    strategies: list[str]
    out_dir: Path


def _vector(text: str, n: int, where: str) -> np.ndarray:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != n:
        raise ConfigError(f"{where}: expected {n} comma-separated numbers, got {text!r}")
    try:
        return np.array([float(p) for p in parts])
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _float(section, key: str, default: float, where: str) -> float:
    raw = section.get(key)
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{where}.{key}: not a number: {raw!r}") from exc


def resolve_config_path(name_or_path: str) -> Path:
    """Accept a filesystem path or the name of a bundled scenario (fig1..fig3)."""
    path = Path(name_or_path)
    if path.exists():
        return path
    bundled = resources.files("adepth") / "scenarios" / f"{name_or_path}.cfg"
    if bundled.is_file():
        return Path(str(bundled))
    raise ConfigError(f"config file not found: {name_or_path}")


def load_config(path) -> tuple[ScenarioConfig, list[str]]:
    """Parse a scenario file; returns the base config and the strategy list."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    sc = parser["scenario"] if parser.has_section("scenario") else {}
    gains = parser["gains"] if parser.has_section("gains") else {}
    limits = parser["limits"] if parser.has_section("limits") else {}
    initial = parser["initial"] if parser.has_section("initial") else {}
    ref = parser["reference"] if parser.has_section("reference") else {}

    strategies = [s.strip() for s in sc.get("strategy", "case_a").split(",") if s.strip()]
    for s in strategies:
        if s not in STRATEGIES:
            raise ConfigError(f"{path}: unknown strategy {s!r}, expected one of {STRATEGIES}")

    defaults = ScenarioConfig()
    try:
        cfg = ScenarioConfig(
            name=sc.get("name", path.stem),
            strategy=strategies[0] if strategies else "case_a",
            dt=_float(sc, "dt", defaults.dt, "scenario"),
            horizon=_float(sc, "horizon", defaults.horizon, "scenario"),
            s_min_norm=_float(sc, "singularity_guard", defaults.s_min_norm, "scenario"),
            chi_floor=_float(sc, "chi_floor", defaults.chi_floor, "scenario"),
            k_s=_float(gains, "k_s", defaults.k_s, "gains"),
            k_chi=_float(gains, "k_chi", defaults.k_chi, "gains"),
            k_p=_float(gains, "k_p", defaults.k_p, "gains"),
            v_max=_float(limits, "v_max", defaults.v_max, "limits"),
            w_max=_float(limits, "w_max", defaults.w_max, "limits"),
            s0=_vector(initial.get("s", "0.2, 0.0"), 2, "initial.s"),
            chi0=_float(initial, "chi", defaults.chi0, "initial"),
            chi_hat0=_float(initial, "chi_hat", defaults.chi_hat0, "initial"),
            reference_type=ref.get("type", defaults.reference_type),
            s_des=_vector(ref.get("s_des", "0.1, -0.17320508075688773"), 2, "reference.s_des"),
            circle_radius=_float(ref, "radius", defaults.circle_radius, "reference"),
            circle_period=_float(ref, "period", defaults.circle_period, "reference"),
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return cfg, strategies


def save_config(cfg: ScenarioConfig, strategies: list[str], path) -> Path:
    """Serialize a config so that load_config reads back identical values."""

    def num(x) -> str:
        return repr(float(x))

    parser = configparser.ConfigParser()
    parser["scenario"] = {
        "name": cfg.name,
        "strategy": ", ".join(strategies),
        "dt": num(cfg.dt),
        "horizon": num(cfg.horizon),
        "singularity_guard": num(cfg.s_min_norm),
        "chi_floor": num(cfg.chi_floor),
    }
    parser["gains"] = {"k_s": num(cfg.k_s), "k_chi": num(cfg.k_chi), "k_p": num(cfg.k_p)}
    parser["limits"] = {"v_max": num(cfg.v_max), "w_max": num(cfg.w_max)}
    parser["initial"] = {
        "s": f"{num(cfg.s0[0])}, {num(cfg.s0[1])}",
        "chi": num(cfg.chi0),
        "chi_hat": num(cfg.chi_hat0),
    }
    parser["reference"] = {
        "type": cfg.reference_type,
        "s_des": f"{num(cfg.s_des[0])}, {num(cfg.s_des[1])}",
        "radius": num(cfg.circle_radius),
        "period": num(cfg.circle_period),
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        parser.write(f)
    return path


def _constraint_violations(logrun: SimLog) -> int:
    tol = logrun.config.constraint_tol
    jlw, jqv = logrun["Jl_w"], logrun["Jq_v"]
    chi_hat, sig = logrun["chi_hat"], logrun["sigma_sq"]
    c1 = jlw <= tol
    c2 = ((chi_hat > 0.0) & (jqv <= tol)) | (np.abs(jqv) <= tol)
    c3 = sig > tol
    return int(np.sum(~(c1 & c2 & c3)))


def _summarize(logrun: SimLog, csv_name: str) -> dict:
    return {
        "csv": csv_name,
        "status": logrun.status,
        "stop_time": logrun.stop_time,
        "rows": logrun.n_rows,
        "final_chi_tilde": float(logrun["chi_tilde"][-1]),
        "final_e_norm": float(logrun["e_norm"][-1]),
        "min_vdot_margin": float(np.min(-logrun["V_dot"])),
        "constraint_violations": _constraint_violations(logrun),
        "depth_convergence_time": depth_convergence_time(logrun, CONVERGENCE_FRACTION),
        "tracking_convergence_time": tracking_convergence_time(logrun, TRACKING_THRESHOLD),
        "chi_clamp_steps": logrun.chi_clamp_steps,
    }


def _run_strategies(
    base: ScenarioConfig, strategies: list[str], out_dir: Path
) -> tuple[dict, list[str]]:
    """Run every strategy from identical initial conditions; collect summaries."""
    out_dir.mkdir(parents=True, exist_ok=True)
    summaries: dict[str, dict] = {}
    failures: list[str] = []
    single = len(strategies) == 1
    for strategy in strategies:
        cfg = ScenarioConfig(
            **{**base.__dict__, "strategy": strategy, "name": f"{base.name}_{strategy}"}
        )
        csv_name = "run.csv" if single else f"{strategy}.csv"
        try:
            logrun = run_scenario(cfg)
        except AdepthError as exc:
            log.error("strategy %s failed: %s", strategy, exc)
            summaries[strategy] = {"csv": None, "status": "error", "error": str(exc)}
            failures.append(strategy)
            continue
        logrun.to_csv(out_dir / csv_name)
        summaries[strategy] = _summarize(logrun, csv_name)
    return summaries, failures


def cmd_run(config_path, out_dir=None, dt=None, horizon=None) -> int:
    """Run the scenario (all strategies it lists) and write CSV logs + summary.json."""
    try:
        path = resolve_config_path(str(config_path))
        base, strategies = load_config(path)
        if dt is not None:
            base = ScenarioConfig(**{**base.__dict__, "dt": float(dt)})
        if horizon is not None:
            base = ScenarioConfig(**{**base.__dict__, "horizon": float(horizon)})
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out = Path(out_dir) if out_dir is not None else Path(f"{base.name}_out")
    summaries, failures = _run_strategies(base, strategies, out)
    payload = {
        "scenario": base.name,
        "dt": base.dt,
        "horizon": base.horizon,
        "strategies": summaries,
    }
    with open(out / "summary.json", "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
    print(f"wrote {out / 'summary.json'}")
    return 3 if failures else 0


def cmd_compare(spec: ComparisonSpec) -> int:
    """Run all strategies from identical initial conditions and rank convergence."""
    if not spec.strategies:
        print("config error: empty strategy list", file=sys.stderr)
        return 2
    summaries, failures = _run_strategies(spec.base, spec.strategies, spec.out_dir)
    comparison = {
        "scenario": spec.base.name,
        "convergence_fraction": CONVERGENCE_FRACTION,
        "strategies": {
            name: {
                "depth_convergence_time": s.get("depth_convergence_time"),
                "tracking_convergence_time": s.get("tracking_convergence_time"),
                "status": s.get("status"),
            }
            for name, s in summaries.items()
        },
    }
    with open(spec.out_dir / "comparison.json", "w", encoding="utf-8") as f:
        json.dump(comparison, f, indent=2, sort_keys=True)
    with open(spec.out_dir / "summary.json", "w", encoding="utf-8") as f:
        json.dump({"scenario": spec.base.name, "strategies": summaries}, f, indent=2, sort_keys=True)
    print(f"wrote {spec.out_dir / 'comparison.json'}")
    return 3 if failures else 0


def _selftest_allocation(rng: np.random.Generator, n: int) -> tuple[int, int]:
    grid_n = 2000
    failures = 0
    for _ in range(n):
        angle = rng.uniform(0.0, 2.0 * np.pi)
        v2 = np.array([np.cos(angle), np.sin(angle)])
        v1 = rng.normal(size=2)
        norm = np.linalg.norm(v1)
        v1 = v1 / norm * rng.uniform(0.1, 2.0)
        r, b = rng.uniform(1e-3, 2.0), rng.uniform(0.1, 1.5)
        problem = allocation.AllocationProblem(v1, v2, r, b)
        ana = allocation.solve_analytic(problem)
        ora = allocation.solve_bruteforce(problem, grid_n)
        if r <= b and not (ana.feasible and ora.feasible):
            failures += 1
            continue
        if ana.feasible != ora.feasible:
            failures += 1
            continue
        if ana.feasible:
            if abs(ana.lambda1 - ora.lambda1) > 1.0 / grid_n + 1e-9:
                failures += 1
                continue
            resid = np.linalg.norm(ana.lambda1 * v1 + ana.lambda2 * v2 - r * ana.v_r)
            if resid > 1e-9 * r:
                failures += 1
    return n - failures, failures


def _domain_sample(rng: np.random.Generator):
    """A state/twist draw at the scales the system actually operates at.

    Speeds respect camera-like bounds; with the stiff depth gain k_chi an
    unbounded draw would push values where 1e-12 absolute agreement is
    beyond double precision.
    """
    s = rng.uniform(-1.0, 1.0, size=2)
    chi = rng.uniform(0.0, 3.0)
    v = rng.uniform(-1.0, 1.0, size=3)
    v *= rng.uniform(0.0, 0.1) / max(float(np.linalg.norm(v)), 1e-12)
    w = rng.uniform(-1.0, 1.0, size=3)
    w *= rng.uniform(0.0, 0.15) / max(float(np.linalg.norm(w)), 1e-12)
    return s, chi, CameraTwist(v, w)


def _selftest_dynamics(rng: np.random.Generator, n: int) -> tuple[int, int]:
    failures = 0
    for _ in range(n):
        s, chi, u = _domain_sample(rng)
        s_dot, chi_dot = geometry.feature_dynamics(s, chi, u)
        full = geometry.optical_flow_matrix(s, chi) @ np.concatenate([u.v, u.w])
        if np.max(np.abs(full - np.array([s_dot[0], s_dot[1], chi_dot]))) > 1e-12:
            failures += 1
    return n - failures, failures


def _selftest_error_identity(rng: np.random.Generator, n: int) -> tuple[int, int]:
    failures = 0
    gains = ObserverGains(10.0, 2500.0)
    for _ in range(n):
        s, chi, u = _domain_sample(rng)
        est = EstimatorState(s + rng.uniform(-0.5, 0.5, size=2), rng.uniform(0.0, 3.0))
        sd, cd = geometry.feature_dynamics(s, chi, u)
        od, ocd = observer.observer_rhs(s, est, u, gains)
        ed, ecd = observer.error_rhs(s, chi, est, u, gains)
        if (
            np.max(np.abs(ed - (sd - od))) > 1e-12
            or abs(ecd - (cd - ocd)) > 1e-12
        ):
            failures += 1
    return n - failures, failures


def cmd_selftest() -> int:
    """Run the built-in oracle suites; exit 0 iff every check passes."""
    rng = np.random.default_rng(2024)
    suites = (
        ("allocation solver vs grid oracle", _selftest_allocation, 2000),
        ("flow matrix vs block dynamics", _selftest_dynamics, 2000),
        ("error dynamics identity", _selftest_error_identity, 2000),
    )
    all_ok = True
    for name, fn, n in suites:
        passed, failed = fn(rng, n)
        ok = failed == 0
        all_ok &= ok
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {passed}/{n} checks passed")
    return 0 if all_ok else 1


def main(argv=None) -> int:
    level = os.environ.get("ADEPTH_LOG_LEVEL", "warn").lower()
    logging.basicConfig(level=_LOG_LEVELS.get(level, logging.WARNING))

    parser = argparse.ArgumentParser(prog="adepth", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario config")
    p_run.add_argument("config", help="config file path or bundled name (fig1, fig2, fig3)")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.add_argument("--dt", type=float, default=None, help="override step size [s]")
    p_run.add_argument("--horizon", type=float, default=None, help="override horizon [s]")

    p_cmp = sub.add_parser("compare", help="run all strategies of a config and compare")
    p_cmp.add_argument("config", help="config file path or bundled name")
    p_cmp.add_argument("--out", default=None, help="output directory")

    sub.add_parser("selftest", help="run built-in oracle suites")

    args = parser.parse_args(argv)
    if args.command == "run":
        return cmd_run(args.config, args.out, args.dt, args.horizon)
    if args.command == "compare":
        try:
            path = resolve_config_path(args.config)
            base, strategies = load_config(path)
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
        out = Path(args.out) if args.out is not None else Path(f"{base.name}_out")
        return cmd_compare(ComparisonSpec(base, strategies, out))
    return cmd_selftest()


if __name__ == "__main__":
    sys.exit(main())
