"""Inverse-depth observer and fixed-step integration of the coupled system.

The estimator evolves (s_hat, chi_hat) from the measured feature s and the
commanded twist (v, w):

    s_hat_dot   = Jv v chi_hat + Jw w + k_s (s - s_hat)
    chi_hat_dot = Jq v chi_hat^2 + Jl w chi_hat + k_chi (Jv v)^T (s - s_hat)

All Jacobians are evaluated at the measured s (the available signal); with
that choice the error e = (s - s_hat, chi - chi_hat) obeys

    s_tilde_dot   = Jv v chi_tilde - k_s s_tilde
    chi_tilde_dot = chi_tilde (Jq v (chi + chi_hat) + Jl w)
                    - k_chi (Jv v)^T s_tilde

which is the form the stability analysis relies on.  chi_hat is clamped at
zero after every step: the estimate of an inverse depth has no business
being negative, and the convergence argument branches on chi_hat > 0.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import IntegrationError
from .geometry import CameraTwist, feature_dynamics, jacobians, point_dynamics_world, project

__all__ = [
    "EstimatorState",
    "ObserverGains",
    "ErrorState",
    "estimation_error",
    "observer_rhs",
    "error_rhs",
    "CoupledState",
    "integrate_step",
]


@dataclass
class EstimatorState:
    """Observer state: estimated feature s_hat and estimated inverse depth chi_hat."""

    s_hat: np.ndarray
    chi_hat: float

    def __post_init__(self):
        self.s_hat = np.asarray(self.s_hat, dtype=float)
        self.chi_hat = float(self.chi_hat)


@dataclass
class ObserverGains:
    k_s: float
    k_chi: float

    def __post_init__(self):
        if self.k_s <= 0.0 or self.k_chi <= 0.0:
            raise ValueError(f"observer gains must be positive, got {self}")


@dataclass
class ErrorState:
    """Estimation errors s_tilde = s - s_hat and chi_tilde = chi - chi_hat."""

    s_tilde: np.ndarray
    chi_tilde: float


def estimation_error(s, chi: float, est: EstimatorState) -> ErrorState:
    return ErrorState(np.asarray(s, dtype=float) - est.s_hat, float(chi) - est.chi_hat)


def observer_rhs(
    meas_s, est: EstimatorState, u: CameraTwist, gains: ObserverGains
) -> tuple[np.ndarray, float]:
    """Time derivative (s_hat_dot, chi_hat_dot) of the estimator state."""
    J = jacobians(meas_s)
    s_tilde = np.asarray(meas_s, dtype=float) - est.s_hat
    Jv_v = J.Jv @ u.v
    s_hat_dot = Jv_v * est.chi_hat + J.Jw @ u.w + gains.k_s * s_tilde
    chi_hat_dot = (
        (J.Jq @ u.v) * est.chi_hat**2
        + (J.Jl @ u.w) * est.chi_hat
        + gains.k_chi * (Jv_v @ s_tilde)
    )
    return s_hat_dot, float(chi_hat_dot)


def error_rhs(
    s, chi: float, est: EstimatorState, u: CameraTwist, gains: ObserverGains
) -> tuple[np.ndarray, float]:
    """Closed-form error dynamics (s_tilde_dot, chi_tilde_dot).

    Algebraically identical to feature_dynamics minus observer_rhs; kept as
    a separate route because the stability monitor differentiates it.
    """
    J = jacobians(s)
    err = estimation_error(s, chi, est)
    Jv_v = J.Jv @ u.v
    s_tilde_dot = Jv_v * err.chi_tilde - gains.k_s * err.s_tilde
    chi_tilde_dot = err.chi_tilde * (
        (J.Jq @ u.v) * (chi + est.chi_hat) + J.Jl @ u.w
    ) - gains.k_chi * (Jv_v @ err.s_tilde)
    return s_tilde_dot, float(chi_tilde_dot)


@dataclass
class CoupledState:
    """True state plus estimator state, for joint fixed-step integration.

    The true state is either a camera-frame point (kind="point",
    truth = (X, Y, Z)) or the projected state itself (kind="feature",
    truth = (x, y, chi)).  chi_clamped records whether the last step had to
    project chi_hat back to zero.
    """

    kind: str
    truth: np.ndarray
    s_hat: np.ndarray
    chi_hat: float
    chi_clamped: bool = False

    def __post_init__(self):
        if self.kind not in ("point", "feature"):
            raise ValueError(f"unknown truth kind {self.kind!r}")
        self.truth = np.asarray(self.truth, dtype=float)
        self.s_hat = np.asarray(self.s_hat, dtype=float)

    def measured_s(self) -> np.ndarray:
        if self.kind == "point":
            return project(self.truth)[0]
        return self.truth[:2].copy()

    def true_chi(self) -> float:
        if self.kind == "point":
            return project(self.truth)[1]
        return float(self.truth[2])

    def estimator(self) -> EstimatorState:
        return EstimatorState(self.s_hat.copy(), self.chi_hat)


def _coupled_rhs(y: np.ndarray, kind: str, u: CameraTwist, gains: ObserverGains) -> np.ndarray:
    truth, s_hat, chi_hat = y[:3], y[3:5], y[5]
    if kind == "point":
        truth_dot = point_dynamics_world(truth, u)
        meas_s, _ = project(truth)
    else:
        s_dot, chi_dot = feature_dynamics(truth[:2], truth[2], u)
        truth_dot = np.array([s_dot[0], s_dot[1], chi_dot])
        meas_s = truth[:2]
    est = EstimatorState(s_hat, chi_hat)
    s_hat_dot, chi_hat_dot = observer_rhs(meas_s, est, u, gains)
    return np.concatenate([truth_dot, s_hat_dot, [chi_hat_dot]])


def integrate_step(
    state: CoupledState, u: CameraTwist, gains: ObserverGains, dt: float
) -> CoupledState:
    """Advance the coupled true/estimated system one step with classical RK4.

    The twist is held constant over the step.  Raises IntegrationError if
    the state goes non-finite.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    y = np.concatenate([state.truth, state.s_hat, [state.chi_hat]])
    k1 = _coupled_rhs(y, state.kind, u, gains)
    k2 = _coupled_rhs(y + 0.5 * dt * k1, state.kind, u, gains)
    k3 = _coupled_rhs(y + 0.5 * dt * k2, state.kind, u, gains)
    k4 = _coupled_rhs(y + dt * k3, state.kind, u, gains)
    y_next = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(y_next)):
        raise IntegrationError(f"non-finite state after step: {y_next}")
    chi_hat = float(y_next[5])
    clamped = chi_hat < 0.0
    return replace(
        state,
        truth=y_next[:3],
        s_hat=y_next[3:5],
        chi_hat=max(chi_hat, 0.0),
        chi_clamped=clamped,
    )
