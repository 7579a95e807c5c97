"""Camera/feature kinematics for a single tracked 3D point.

A static point p = (X, Y, Z), expressed in the camera frame, projects onto
the normalized image plane at s = (X/Z, Y/Z); its inverse depth is
chi = 1/Z.  For a camera moving with body twist (v, w) the projected
dynamics are

    s_dot   = Jv(s) v chi + Jw(s) w
    chi_dot = Jq v chi^2 + Jl(s) w chi

with the interaction blocks

    Jv = [[-1, 0, x], [0, -1, y]]
    Jw = [[x*y, -(1+x^2), y], [1+y^2, -x*y, -x]]
    Jq = [0, 0, 1]
    Jl = [y, -x, 0].

The same motion in Cartesian coordinates is the rigid-body flow
p_dot = -v - w x p, which the simulator uses as ground truth so that the
observer is never tested against its own model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "CameraTwist",
    "InteractionJacobians",
    "project",
    "jacobians",
    "feature_dynamics",
    "point_dynamics_world",
    "optical_flow_matrix",
]


@dataclass
class CameraTwist:
    """Camera linear velocity v (m/s) and angular velocity w (rad/s), body frame."""

    v: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        self.v = np.asarray(self.v, dtype=float)
        self.w = np.asarray(self.w, dtype=float)

    @staticmethod
    def zero() -> "CameraTwist":
        return CameraTwist(np.zeros(3), np.zeros(3))


@dataclass
class InteractionJacobians:
    """Interaction blocks evaluated at one image point.

    Jv, Jw map (v, w) to s_dot contributions (2x3 each); Jq, Jl map them to
    chi_dot contributions (1x3 rows, stored as length-3 vectors).
    """

    Jv: np.ndarray
    Jw: np.ndarray
    Jq: np.ndarray
    Jl: np.ndarray


def project(p) -> tuple[np.ndarray, float]:
    """Project a camera-frame point to ((X/Z, Y/Z), 1/Z).

    Raises DomainError if Z <= 0: a real camera cannot observe a point at or
    behind its optical center.
    """
    p = np.asarray(p, dtype=float)
    X, Y, Z = p
    if Z <= 0.0:
        raise DomainError(f"point behind camera: Z = {Z}")
    return np.array([X / Z, Y / Z]), 1.0 / Z


def jacobians(s) -> InteractionJacobians:
    """Interaction Jacobians at normalized image coordinates s = (x, y)."""
    x, y = float(s[0]), float(s[1])
    Jv = np.array([[-1.0, 0.0, x], [0.0, -1.0, y]])
    Jw = np.array([[x * y, -(1.0 + x * x), y], [1.0 + y * y, -x * y, -x]])
    Jq = np.array([0.0, 0.0, 1.0])
    Jl = np.array([y, -x, 0.0])
    return InteractionJacobians(Jv, Jw, Jq, Jl)


def feature_dynamics(s, chi: float, u: CameraTwist) -> tuple[np.ndarray, float]:
    """Projected-point dynamics (s_dot, chi_dot) for twist u at state (s, chi)."""
    J = jacobians(s)
    s_dot = J.Jv @ u.v * chi + J.Jw @ u.w
    chi_dot = (J.Jq @ u.v) * chi * chi + (J.Jl @ u.w) * chi
    return s_dot, float(chi_dot)


def point_dynamics_world(p, u: CameraTwist) -> np.ndarray:
    """Camera-frame velocity of a world-fixed point: p_dot = -v - w x p."""
    p = np.asarray(p, dtype=float)
    return -u.v - np.cross(u.w, p)


def optical_flow_matrix(s, chi: float) -> np.ndarray:
    """Full 3x6 matrix mapping (v, w) to (x_dot, y_dot, chi_dot).

    Row-expanded form of the block dynamics; kept as an independent route so
    the two can be cross-checked.
    """
    x, y = float(s[0]), float(s[1])
    c = float(chi)
    return np.array(
        [
            [-c, 0.0, x * c, x * y, -(1.0 + x * x), y],
            [0.0, -c, y * c, 1.0 + y * y, -x * y, -x],
            [0.0, 0.0, c * c, y * c, -x * c, 0.0],
        ]
    )
