"""Lyapunov bookkeeping and excitation monitoring for the depth observer.

The observer's energy function is

    V = 1/2 ||s_tilde||^2 + 1/(2 k_chi) chi_tilde^2

whose rate along the error dynamics reduces to

    V_dot = -k_s ||s_tilde||^2
            + (1/k_chi) chi_tilde^2 Jq v (chi + chi_hat)
            + (1/k_chi) chi_tilde^2 Jl w.

All three terms are non-positive whenever the camera input satisfies

    (1) Jl w <= 0
    (2) Jq v <= 0 if chi_hat > 0, else Jq v = 0
    (3) sigma^2 = (x v_z - v_x)^2 + (y v_z - v_y)^2 > 0

and (3) is the persistency-of-excitation condition that makes the depth
error itself converge, not just stay bounded.  This module evaluates V,
V_dot, sigma^2 and the three checks so a simulation can assert them at
every step and log them as channels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import CameraTwist, jacobians
from .observer import ErrorState, EstimatorState, ObserverGains, estimation_error

__all__ = [
    "StabilityReport",
    "lyapunov_value",
    "lyapunov_rate",
    "pe_sigma_squared",
    "check_theorem1",
    "stability_report",
]


@dataclass
class StabilityReport:
    """Snapshot of the stability channels at one instant.

    V and V_dot need the true inverse depth and are NaN when the report was
    built from measurable quantities only.
    """

    V: float
    V_dot: float
    sigma_sq: float
    c1_Jl_w: float
    c2_Jq_v: float
    c1_ok: bool
    c2_ok: bool
    c3_ok: bool

    def all_ok(self) -> bool:
        return self.c1_ok and self.c2_ok and self.c3_ok


def lyapunov_value(err: ErrorState, k_chi: float) -> float:
    """V = 1/2 ||s_tilde||^2 + 1/(2 k_chi) chi_tilde^2."""
    if k_chi <= 0.0:
        raise ValueError(f"k_chi must be positive, got {k_chi}")
    s_tilde = np.asarray(err.s_tilde, dtype=float)
    return 0.5 * float(s_tilde @ s_tilde) + err.chi_tilde**2 / (2.0 * k_chi)


def lyapunov_rate(
    s, chi: float, est: EstimatorState, u: CameraTwist, gains: ObserverGains
) -> float:
    """Closed-form V_dot; equals the chain rule applied to the error dynamics."""
    J = jacobians(s)
    err = estimation_error(s, chi, est)
    ct2 = err.chi_tilde**2
    return float(
        -gains.k_s * (err.s_tilde @ err.s_tilde)
        + ct2 * (J.Jq @ u.v) * (chi + est.chi_hat) / gains.k_chi
        + ct2 * (J.Jl @ u.w) / gains.k_chi
    )


def pe_sigma_squared(s, v) -> float:
    """Excitation measure sigma^2 = (x v_z - v_x)^2 + (y v_z - v_y)^2 = ||Jv v||^2."""
    x, y = float(s[0]), float(s[1])
    vx, vy, vz = float(v[0]), float(v[1]), float(v[2])
    return (x * vz - vx) ** 2 + (y * vz - vy) ** 2


def check_theorem1(
    s, est: EstimatorState, u: CameraTwist, tol: float = 1e-9
) -> StabilityReport:
    """Evaluate the three input constraints from measurable quantities.

    Condition (2) branches: with chi_hat > 0 any Jq v <= 0 is acceptable,
    otherwise Jq v must vanish.  tol only absorbs floating-point residue;
    the controllers satisfy the constraints analytically.
    """
    if tol < 0.0:
        raise ValueError(f"tol must be non-negative, got {tol}")
    J = jacobians(s)
    Jl_w = float(J.Jl @ u.w)
    Jq_v = float(J.Jq @ u.v)
    sigma_sq = pe_sigma_squared(s, u.v)
    c1_ok = Jl_w <= tol
    c2_ok = (est.chi_hat > 0.0 and Jq_v <= tol) or abs(Jq_v) <= tol
    c3_ok = sigma_sq > tol
    return StabilityReport(
        V=math.nan,
        V_dot=math.nan,
        sigma_sq=sigma_sq,
        c1_Jl_w=Jl_w,
        c2_Jq_v=Jq_v,
        c1_ok=c1_ok,
        c2_ok=c2_ok,
        c3_ok=c3_ok,
    )


def stability_report(
    s,
    chi: float,
    est: EstimatorState,
    u: CameraTwist,
    gains: ObserverGains,
    tol: float = 1e-9,
) -> StabilityReport:
    """Full report including V and V_dot; needs the true inverse depth."""
    report = check_theorem1(s, est, u, tol)
    report.V = lyapunov_value(estimation_error(s, chi, est), gains.k_chi)
    report.V_dot = lyapunov_rate(s, chi, est, u, gains)
    return report
