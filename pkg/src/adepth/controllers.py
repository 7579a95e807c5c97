"""Camera control laws that track an image reference while exciting the observer.

All strategies command a twist with v_z = 0 and ||v|| = v_max, which pins the
excitation measure at sigma^2 = v_max^2, and split the remaining freedom
between following the reference velocity pi and staying inside the angular
budget ||w|| <= w_max.  The split is the allocation problem of
:mod:`adepth.allocation` with

    v1 = -pi,   r = chi_hat * v_max,   b = w_max,

whose solution yields the tracking scale lambda_pi (the commanded image
velocity is lambda_pi * pi when the depth estimate is exact).

Strategies:

* ``case_a`` (relaxed depth): w may decrease the inverse depth (Jl w <= 0).
  The angular velocity lives in the span of s and its perpendicular; when
  the slack component keeps the correct sign, the helper direction v2 is
  aligned with pi itself, which maximizes lambda_pi within the budget.
  Otherwise it falls back to the depth-neutral direction.
* ``case_b`` (constant depth): w is parallel to s, so Jl w = 0 exactly and
  the true depth never changes.
* ``baseline_origin``: case_b machinery with the reference pinned to the
  image origin, mimicking estimators that must center the feature.

The image origin is a genuine singularity of the w parameterization, so all
strategies refuse to run below a configurable ||s|| guard.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .allocation import AllocationProblem, solve_analytic
from .errors import SingularityError
from .geometry import CameraTwist

__all__ = [
    "CameraLimits",
    "ControlDiagnostics",
    "ControlOutput",
    "ReferenceSignal",
    "ConstantReference",
    "CircularReference",
    "CallableReference",
    "STRATEGIES",
    "proportional_reference",
    "control_case_a",
    "control_case_b",
    "control_baseline_origin",
    "reference_circular",
]

STRATEGIES = ("case_a", "case_b", "baseline_origin")

DEFAULT_S_MIN_NORM = 1e-3
DEFAULT_CHI_FLOOR = 1e-3


@dataclass
class CameraLimits:
    """Actuator bounds: max linear speed (m/s) and max angular speed (rad/s)."""

    v_max: float = 0.1
    w_max: float = 0.15

    def __post_init__(self):
        if self.v_max <= 0.0 or self.w_max <= 0.0:
            raise ValueError(f"camera limits must be positive, got {self}")


@dataclass
class ControlDiagnostics:
    branch: str  # "pi_aligned" | "fallback" | "hold"
    lambda_s: np.ndarray = field(default_factory=lambda: np.zeros(2))
    v2: np.ndarray = field(default_factory=lambda: np.zeros(2))
    allocation_feasible: bool = True


@dataclass
class ControlOutput:
    twist: CameraTwist
    lambda_pi: float
    lambda_w: float
    diagnostics: ControlDiagnostics


class ReferenceSignal:
    """Desired image trajectory s_des(t) with its time derivative."""

    def value(self, t: float) -> np.ndarray:
        raise NotImplementedError

    def rate(self, t: float) -> np.ndarray:
        raise NotImplementedError


@dataclass
class ConstantReference(ReferenceSignal):
    s_des: np.ndarray

    def __post_init__(self):
        self.s_des = np.asarray(self.s_des, dtype=float)

    def value(self, t: float) -> np.ndarray:
        return self.s_des.copy()

    def rate(self, t: float) -> np.ndarray:
        return np.zeros(2)


@dataclass
class CircularReference(ReferenceSignal):
    radius: float = 0.1
    period: float = 10.0

    def value(self, t: float) -> np.ndarray:
        a = 2.0 * math.pi * t / self.period
        return self.radius * np.array([math.cos(a), math.sin(a)])

    def rate(self, t: float) -> np.ndarray:
        a = 2.0 * math.pi * t / self.period
        k = 2.0 * math.pi / self.period
        return self.radius * k * np.array([-math.sin(a), math.cos(a)])


class CallableReference(ReferenceSignal):
    """Wrap a plain callable; the rate is finite-differenced unless given."""

    def __init__(self, fn, rate_fn=None, fd_step: float = 1e-6):
        self._fn = fn
        self._rate_fn = rate_fn
        self._fd_step = fd_step

    def value(self, t: float) -> np.ndarray:
        return np.asarray(self._fn(t), dtype=float)

    def rate(self, t: float) -> np.ndarray:
        if self._rate_fn is not None:
            return np.asarray(self._rate_fn(t), dtype=float)
        h = self._fd_step
        return (self.value(t + h) - self.value(max(t - h, 0.0))) / (
            h + min(t, h)
        )


def reference_circular(t: float) -> np.ndarray:
    """Reference circle of radius 0.1 traversed with a 10 s period."""
    return CircularReference().value(t)


def proportional_reference(s, s_des, k_p: float) -> np.ndarray:
    """Feedback reference velocity pi = -k_p (s - s_des)."""
    if k_p <= 0.0:
        raise ValueError(f"k_p must be positive, got {k_p}")
    return -k_p * (np.asarray(s, dtype=float) - np.asarray(s_des, dtype=float))


def _frame_vectors(s: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    """||s||, the unit vector along s and the unit perpendicular (-y, x)/||s||."""
    ns = float(np.linalg.norm(s))
    s_hat = s / ns
    s_perp_hat = np.array([-s_hat[1], s_hat[0]])
    return ns, s_hat, s_perp_hat


def _hold_output(s_perp_hat: np.ndarray, limits: CameraLimits, feasible: bool) -> ControlOutput:
    # No usable reference (or no feasible split): keep translating on the
    # v_z = 0 circle so the excitation never drops, but stop steering.
    v = limits.v_max * np.array([s_perp_hat[0], s_perp_hat[1], 0.0])
    twist = CameraTwist(v, np.zeros(3))
    return ControlOutput(
        twist, 0.0, 0.0, ControlDiagnostics(branch="hold", allocation_feasible=feasible)
    )


def _solve_and_assemble(
    s: np.ndarray,
    chi_hat: float,
    pi: np.ndarray,
    limits: CameraLimits,
    pi_aligned: bool,
    chi_floor: float,
) -> ControlOutput:
    ns, s_hat, s_perp_hat = _frame_vectors(s)
    chi_eff = max(chi_hat, chi_floor)
    r = chi_eff * limits.v_max
    n_pi = float(np.linalg.norm(pi))
    v2 = pi / n_pi if pi_aligned else s_perp_hat
    sol = solve_analytic(AllocationProblem(-pi, v2, r, limits.w_max))
    if not sol.feasible:
        return _hold_output(s_perp_hat, limits, feasible=False)
    if pi_aligned:
        # lambda_s = lambda_w ||s|| (Jwbar S)^-1 pi/||pi||, where S has
        # columns (-s_perp_hat, s_hat) and Jwbar is the left 2x2 of Jw.
        x, y = float(s[0]), float(s[1])
        Jwbar = np.array([[x * y, -(1.0 + x * x)], [1.0 + y * y, -x * y]])
        S = np.column_stack([-s_perp_hat, s_hat])
        M = Jwbar @ S
        det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
        rhs = v2
        lam_s = (
            sol.lambda2
            * ns
            / det
            * np.array(
                [
                    M[1, 1] * rhs[0] - M[0, 1] * rhs[1],
                    -M[1, 0] * rhs[0] + M[0, 0] * rhs[1],
                ]
            )
        )
        w12 = S @ lam_s / ns
    else:
        lam_s = np.array([0.0, sol.lambda2 * ns])
        w12 = sol.lambda2 * s_hat
    v = limits.v_max * np.array([sol.v_r[0], sol.v_r[1], 0.0])
    w = np.array([w12[0], w12[1], 0.0])
    diag = ControlDiagnostics(
        branch="pi_aligned" if pi_aligned else "fallback",
        lambda_s=lam_s,
        v2=v2,
        allocation_feasible=True,
    )
    return ControlOutput(CameraTwist(v, w), sol.lambda1, sol.lambda2, diag)


def _guard(s, pi, s_min_norm: float) -> tuple[np.ndarray, np.ndarray, float]:
    s = np.asarray(s, dtype=float)
    pi = np.asarray(pi, dtype=float)
    ns = float(np.linalg.norm(s))
    if ns < s_min_norm:
        raise SingularityError(
            f"||s|| = {ns:.3e} below guard {s_min_norm:.3e}: control frame undefined"
        )
    return s, pi, ns


def control_case_a(
    s,
    chi_hat: float,
    pi,
    limits: CameraLimits,
    *,
    s_min_norm: float = DEFAULT_S_MIN_NORM,
    chi_floor: float = DEFAULT_CHI_FLOOR,
) -> ControlOutput:
    """Relaxed-depth strategy: Jl w <= 0 is allowed to spend on tracking.

    The helper direction is aligned with pi whenever the slack component of
    lambda_s comes out non-positive; the sign of that candidate is
    sign(||pi|| - chi_hat v_max) * sign(s . pi), and the boundary
    ||pi|| = chi_hat v_max is assigned to the fallback.
    """
    s, pi, _ = _guard(s, pi, s_min_norm)
    n_pi = float(np.linalg.norm(pi))
    if n_pi == 0.0:
        return _hold_output(_frame_vectors(s)[2], limits, feasible=True)
    d = n_pi - max(chi_hat, chi_floor) * limits.v_max
    candidate_slack_sign = math.copysign(1.0, d) * float(s @ pi) if d != 0.0 else 1.0
    pi_aligned = d != 0.0 and candidate_slack_sign <= 0.0
    return _solve_and_assemble(s, chi_hat, pi, limits, pi_aligned, chi_floor)


def control_case_b(
    s,
    chi_hat: float,
    pi,
    limits: CameraLimits,
    *,
    s_min_norm: float = DEFAULT_S_MIN_NORM,
    chi_floor: float = DEFAULT_CHI_FLOOR,
) -> ControlOutput:
    """Constant-depth strategy: w parallel to s, so the true depth is frozen."""
    s, pi, _ = _guard(s, pi, s_min_norm)
    if float(np.linalg.norm(pi)) == 0.0:
        return _hold_output(_frame_vectors(s)[2], limits, feasible=True)
    return _solve_and_assemble(s, chi_hat, pi, limits, pi_aligned=False, chi_floor=chi_floor)


def control_baseline_origin(
    s,
    chi_hat: float,
    limits: CameraLimits,
    k_p: float,
    *,
    s_min_norm: float = DEFAULT_S_MIN_NORM,
    chi_floor: float = DEFAULT_CHI_FLOOR,
) -> ControlOutput:
    """Constant-depth strategy driving the feature to the image origin."""
    pi = proportional_reference(s, np.zeros(2), k_p)
    return control_case_b(
        s, chi_hat, pi, limits, s_min_norm=s_min_norm, chi_floor=chi_floor
    )
