"""Deterministic closed-loop simulation of active depth estimation.

The ground truth is a static world point observed from a camera pose that
is propagated in the world frame with an exact per-step screw motion
(piecewise-constant twist), so the observer is never checked against its
own model.  Per control step of length dt:

    measure s  ->  reference pi  ->  controller twist  ->  stability report
    -> advance pose (exact screw) and estimator (RK4, zero-order-hold twist)

Runs are bit-deterministic: the same configuration always produces the
same log, and the CSV writer formats every float identically.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .controllers import (
    CameraLimits,
    CircularReference,
    ConstantReference,
    ReferenceSignal,
    control_baseline_origin,
    control_case_a,
    control_case_b,
    proportional_reference,
    DEFAULT_CHI_FLOOR,
    DEFAULT_S_MIN_NORM,
    STRATEGIES,
)
from .errors import DomainError, IntegrationError, SingularityError
from .geometry import CameraTwist, feature_dynamics, project
from .observer import EstimatorState, ObserverGains, observer_rhs
from .stability import stability_report

__all__ = [
    "CameraPose",
    "ScenarioConfig",
    "SimLog",
    "LOG_COLUMNS",
    "camera_pose_update",
    "world_to_measurement",
    "run_scenario",
    "depth_convergence_time",
    "tracking_convergence_time",
]

log = logging.getLogger(__name__)

LOG_COLUMNS = (
    "t",
    "x",
    "y",
    "s_des_x",
    "s_des_y",
    "x_hat",
    "y_hat",
    "chi",
    "chi_hat",
    "chi_tilde",
    "e_norm",
    "v_x",
    "v_y",
    "v_z",
    "w_x",
    "w_y",
    "w_z",
    "lambda_pi",
    "V",
    "V_dot",
    "sigma_sq",
    "Jl_w",
    "Jq_v",
    "cam_px",
    "cam_py",
    "cam_pz",
    "cam_qw",
    "cam_qx",
    "cam_qy",
    "cam_qz",
)


def _skew(a: np.ndarray) -> np.ndarray:
    return np.array(
        [[0.0, -a[2], a[1]], [a[2], 0.0, -a[0]], [-a[1], a[0], 0.0]]
    )


def _quat_normalize(q: np.ndarray) -> np.ndarray:
    return q / math.sqrt(float(q @ q))


def _quat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ]
    )


def _quat_from_rotvec(phi: np.ndarray) -> np.ndarray:
    theta = math.sqrt(float(phi @ phi))
    if theta < 1e-12:
        return _quat_normalize(np.array([1.0, 0.5 * phi[0], 0.5 * phi[1], 0.5 * phi[2]]))
    half = 0.5 * theta
    k = math.sin(half) / theta
    return np.array([math.cos(half), k * phi[0], k * phi[1], k * phi[2]])


def _quat_to_matrix(q: np.ndarray) -> np.ndarray:
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def _rotation_left_jacobian(phi: np.ndarray) -> np.ndarray:
    """V(phi) with integral of exp([phi] tau): exact translation coupling."""
    theta_sq = float(phi @ phi)
    K = _skew(phi)
    if theta_sq < 1e-8:
        a = 0.5 - theta_sq / 24.0
        b = 1.0 / 6.0 - theta_sq / 120.0
    else:
        theta = math.sqrt(theta_sq)
        a = (1.0 - math.cos(theta)) / theta_sq
        b = (theta - math.sin(theta)) / (theta_sq * theta)
    return np.eye(3) + a * K + b * (K @ K)


@dataclass
class CameraPose:
    """Camera pose in the world frame: position and body-to-world quaternion (w, x, y, z)."""

    position: np.ndarray
    quat: np.ndarray

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float)
        self.quat = np.asarray(self.quat, dtype=float)

    @staticmethod
    def identity() -> "CameraPose":
        return CameraPose(np.zeros(3), np.array([1.0, 0.0, 0.0, 0.0]))

    def rotation(self) -> np.ndarray:
        return _quat_to_matrix(self.quat)

    def to_camera(self, p_world: np.ndarray) -> np.ndarray:
        return self.rotation().T @ (np.asarray(p_world, dtype=float) - self.position)


def camera_pose_update(pose: CameraPose, u: CameraTwist, dt: float) -> CameraPose:
    """Advance the pose by a constant body twist held for dt (exact screw motion)."""
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    phi = u.w * dt
    R = pose.rotation()
    position = pose.position + R @ (_rotation_left_jacobian(phi) @ (u.v * dt))
    quat = _quat_normalize(_quat_mul(pose.quat, _quat_from_rotvec(phi)))
    return CameraPose(position, quat)


def world_to_measurement(pose: CameraPose, point_world, noise=None) -> np.ndarray:
    """Measured feature for a world point: exact projection plus optional noise hook."""
    s, _ = project(pose.to_camera(point_world))
    if noise is not None:
        s = s + np.asarray(noise(s), dtype=float)
    return s


@dataclass
class ScenarioConfig:
    """Everything a closed-loop run needs; defaults follow the reference study."""

    name: str = "scenario"
    strategy: str = "case_a"
    dt: float = 0.005
    horizon: float = 60.0
    s0: np.ndarray = field(default_factory=lambda: np.array([0.2, 0.0]))
    chi0: float = 1.0
    chi_hat0: float = 0.1
    k_s: float = 10.0
    k_chi: float = 2500.0
    k_p: float = 1.0
    v_max: float = 0.1
    w_max: float = 0.15
    reference_type: str = "constant"  # constant | circular | origin
    s_des: np.ndarray = field(default_factory=lambda: np.array([0.1, -0.17320508075688773]))
    circle_radius: float = 0.1
    circle_period: float = 10.0
    s_min_norm: float = DEFAULT_S_MIN_NORM
    chi_floor: float = DEFAULT_CHI_FLOOR
    constraint_tol: float = 1e-9
    log_path: str | None = None

    def __post_init__(self):
        self.s0 = np.asarray(self.s0, dtype=float)
        self.s_des = np.asarray(self.s_des, dtype=float)
        self.validate()

    def validate(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}, expected one of {STRATEGIES}")
        if self.reference_type not in ("constant", "circular", "origin"):
            raise ValueError(f"unknown reference type {self.reference_type!r}")
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.horizon < 0.0:
            raise ValueError(f"horizon must be non-negative, got {self.horizon}")
        if self.chi0 <= 0.0:
            raise ValueError(f"initial inverse depth must be positive, got {self.chi0}")
        if self.chi_hat0 < 0.0:
            raise ValueError(f"initial estimate must be non-negative, got {self.chi_hat0}")
        if min(self.k_s, self.k_chi, self.k_p) <= 0.0:
            raise ValueError("gains k_s, k_chi, k_p must all be positive")
        if min(self.v_max, self.w_max) <= 0.0:
            raise ValueError("camera limits must be positive")

    def make_reference(self) -> ReferenceSignal:
        if self.strategy == "baseline_origin" or self.reference_type == "origin":
            return ConstantReference(np.zeros(2))
        if self.reference_type == "constant":
            return ConstantReference(self.s_des)
        return CircularReference(self.circle_radius, self.circle_period)


@dataclass
class SimLog:
    """Per-step channels of one run plus its termination status."""

    data: dict[str, np.ndarray]
    status: str  # completed | singularity | domain_error
    stop_time: float
    config: ScenarioConfig
    chi_clamp_steps: int = 0
    shadow: dict[str, np.ndarray] | None = None

    def __getitem__(self, column: str) -> np.ndarray:
        return self.data[column]

    @property
    def n_rows(self) -> int:
        return len(self.data["t"])

    def to_csv(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        cols = [self.data[c] for c in LOG_COLUMNS]
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(",".join(LOG_COLUMNS) + "\n")
            for i in range(self.n_rows):
                f.write(",".join("%.12g" % col[i] for col in cols) + "\n")
        return path


def depth_convergence_time(logrun: SimLog, fraction: float = 0.05) -> float:
    """First time |chi_tilde| drops below fraction * |chi_tilde(0)|; NaN if never."""
    ct = logrun["chi_tilde"]
    thr = fraction * abs(ct[0])
    idx = np.flatnonzero(np.abs(ct) < thr)
    return float(logrun["t"][idx[0]]) if idx.size else math.nan


def tracking_convergence_time(logrun: SimLog, threshold: float = 0.01) -> float:
    """First time the tracking error norm drops below threshold; NaN if never."""
    idx = np.flatnonzero(logrun["e_norm"] < threshold)
    return float(logrun["t"][idx[0]]) if idx.size else math.nan


def _controller_for(cfg: ScenarioConfig):
    guards = dict(s_min_norm=cfg.s_min_norm, chi_floor=cfg.chi_floor)
    if cfg.strategy == "baseline_origin":
        return lambda s, chi_hat, pi, limits: control_baseline_origin(
            s, chi_hat, limits, cfg.k_p, **guards
        )
    fn = control_case_a if cfg.strategy == "case_a" else control_case_b
    return lambda s, chi_hat, pi, limits: fn(s, chi_hat, pi, limits, **guards)


def _estimator_rk4(
    est: EstimatorState,
    s0: np.ndarray,
    s_mid: np.ndarray,
    s_end: np.ndarray,
    u: CameraTwist,
    gains: ObserverGains,
    dt: float,
) -> tuple[EstimatorState, bool]:
    """RK4 over one step, with the measurement taken from the exact pose flow."""

    def rhs(s_meas, sh, ch):
        return observer_rhs(s_meas, EstimatorState(sh, ch), u, gains)

    k1s, k1c = rhs(s0, est.s_hat, est.chi_hat)
    k2s, k2c = rhs(s_mid, est.s_hat + 0.5 * dt * k1s, est.chi_hat + 0.5 * dt * k1c)
    k3s, k3c = rhs(s_mid, est.s_hat + 0.5 * dt * k2s, est.chi_hat + 0.5 * dt * k2c)
    k4s, k4c = rhs(s_end, est.s_hat + dt * k3s, est.chi_hat + dt * k3c)
    s_hat = est.s_hat + (dt / 6.0) * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)
    chi_hat = est.chi_hat + (dt / 6.0) * (k1c + 2.0 * k2c + 2.0 * k3c + k4c)
    clamped = chi_hat < 0.0
    return EstimatorState(s_hat, max(chi_hat, 0.0)), clamped


def _feature_ode_rk4(s: np.ndarray, chi: float, u: CameraTwist, dt: float):
    def rhs(y):
        sd, cd = feature_dynamics(y[:2], y[2], u)
        return np.array([sd[0], sd[1], cd])

    y = np.array([s[0], s[1], chi])
    k1 = rhs(y)
    k2 = rhs(y + 0.5 * dt * k1)
    k3 = rhs(y + 0.5 * dt * k2)
    k4 = rhs(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def run_scenario(
    cfg: ScenarioConfig,
    measurement_noise=None,
    shadow_feature_ode: bool = False,
) -> SimLog:
    """Run one closed-loop scenario and return its log.

    measurement_noise, if given, is called as noise(s) and its return value
    is added to the measured feature before the controller and observer see
    it (the logged chi stays exact).  shadow_feature_ode additionally
    integrates the projected dynamics directly, as a cross-check channel.
    """
    cfg.validate()
    limits = CameraLimits(cfg.v_max, cfg.w_max)
    gains = ObserverGains(cfg.k_s, cfg.k_chi)
    controller = _controller_for(cfg)
    reference = cfg.make_reference()
    n_steps = int(round(cfg.horizon / cfg.dt))

    pose = CameraPose.identity()
    point_world = np.array([cfg.s0[0], cfg.s0[1], 1.0]) / cfg.chi0
    est = EstimatorState(cfg.s0.copy(), cfg.chi_hat0)

    cols = {name: np.empty(n_steps + 1) for name in LOG_COLUMNS}
    shadow = None
    if shadow_feature_ode:
        shadow = {"x": np.empty(n_steps + 1), "y": np.empty(n_steps + 1), "chi": np.empty(n_steps + 1)}
        shadow_state = (cfg.s0.copy(), cfg.chi0)

    status = "completed"
    stop_time = n_steps * cfg.dt
    clamp_steps = 0
    rows = 0
    for k in range(n_steps + 1):
        t = k * cfg.dt
        try:
            s_true, chi = project(pose.to_camera(point_world))
        except DomainError:
            status, stop_time = "domain_error", t
            log.warning("%s: point left the visible half-space at t=%.3f", cfg.name, t)
            break
        s_meas = s_true
        if measurement_noise is not None:
            s_meas = s_true + np.asarray(measurement_noise(s_true), dtype=float)

        s_des = reference.value(t)
        pi = reference.rate(t) + proportional_reference(s_meas, s_des, cfg.k_p)
        try:
            out = controller(s_meas, est.chi_hat, pi, limits)
        except SingularityError:
            status, stop_time = "singularity", t
            log.info("%s: controller singularity at t=%.3f, run stopped", cfg.name, t)
            break
        report = stability_report(s_meas, chi, est, out.twist, gains, cfg.constraint_tol)

        e = s_meas - s_des
        row = (
            t,
            s_meas[0],
            s_meas[1],
            s_des[0],
            s_des[1],
            est.s_hat[0],
            est.s_hat[1],
            chi,
            est.chi_hat,
            chi - est.chi_hat,
            math.hypot(e[0], e[1]),
            out.twist.v[0],
            out.twist.v[1],
            out.twist.v[2],
            out.twist.w[0],
            out.twist.w[1],
            out.twist.w[2],
            out.lambda_pi,
            report.V,
            report.V_dot,
            report.sigma_sq,
            report.c1_Jl_w,
            report.c2_Jq_v,
            pose.position[0],
            pose.position[1],
            pose.position[2],
            pose.quat[0],
            pose.quat[1],
            pose.quat[2],
            pose.quat[3],
        )
        for name, value in zip(LOG_COLUMNS, row):
            cols[name][k] = value
        if shadow is not None:
            shadow["x"][k], shadow["y"][k] = shadow_state[0]
            shadow["chi"][k] = shadow_state[1]
        rows = k + 1

        if k == n_steps:
            break
        pose_half = camera_pose_update(pose, out.twist, 0.5 * cfg.dt)
        pose_next = camera_pose_update(pose_half, out.twist, 0.5 * cfg.dt)
        try:
            s_mid = world_to_measurement(pose_half, point_world, None)
            s_end = world_to_measurement(pose_next, point_world, None)
        except DomainError:
            status, stop_time = "domain_error", t + cfg.dt
            break
        est, clamped = _estimator_rk4(est, s_meas, s_mid, s_end, out.twist, gains, cfg.dt)
        if clamped:
            clamp_steps += 1
            log.debug("%s: chi_hat clamped to zero at t=%.3f", cfg.name, t + cfg.dt)
        if not (np.all(np.isfinite(est.s_hat)) and math.isfinite(est.chi_hat)):
            raise IntegrationError(f"{cfg.name}: estimator went non-finite at t={t + cfg.dt}")
        if shadow is not None:
            y = _feature_ode_rk4(shadow_state[0], shadow_state[1], out.twist, cfg.dt)
            shadow_state = (y[:2], float(y[2]))
        pose = pose_next

    data = {name: col[:rows] for name, col in cols.items()}
    if shadow is not None:
        shadow = {name: col[:rows] for name, col in shadow.items()}
    return SimLog(
        data=data,
        status=status,
        stop_time=stop_time,
        config=cfg,
        chi_clamp_steps=clamp_steps,
        shadow=shadow,
    )
