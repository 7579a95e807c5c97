"""Closed-form solver for a box-constrained direction-allocation problem.

The problem: given v1 (nonzero), a unit vector v2, and positive scalars
r, b, find

    maximize   lambda1
    subject to lambda1 v1 + lambda2 v2 = r v_r,   ||v_r|| = 1,
               0 <= lambda1 <= 1,   -b <= lambda2 <= b.

Geometrically: how much of v1 can be realized, given a bounded helper
along v2 and a budget of exactly r in norm.  Eliminating v_r, the equality
constraint is Q(lambda1, lambda2) = r^2 with the quadratic form

    Q = a lambda1^2 + 2 c lambda1 lambda2 + lambda2^2,
    a = ||v1||^2,  c = v1 . v2.

Q is positive semidefinite (a - c^2 >= 0 by Cauchy-Schwarz), so the
constraint set is an ellipse, or a pair of parallel lines when v1 and v2
are collinear.  Every local maximizer of lambda1 on that curve inside the
box is one of:

  * lambda1 = 1 with a root lambda2 of Q(1, .) = r^2 inside [-b, b];
  * the ellipse's rightmost point lambda1 = r / sqrt(a - c^2),
    lambda2 = -c lambda1 (vertical tangent), when inside the box;
  * a box edge lambda2 = +/-b with lambda1 a root of Q(., +/-b) = r^2
    in [0, 1];
  * the fallback lambda1 = 0, lambda2 = r, valid whenever r <= b (which is
    also why r <= b guarantees feasibility).

The solver enumerates these candidates and keeps the best; a descending
grid scan over lambda1 serves as an independent brute-force oracle.

Feasibility in general: Q is convex, Q(0, 0) = 0, and the box is
connected, so a point with Q = r^2 exists iff r^2 does not exceed the
maximum of Q over the box corners, max Q = a + 2|c| b + b^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "AllocationProblem",
    "AllocationSolution",
    "is_feasible",
    "solve_analytic",
    "solve_bruteforce",
]

# Two candidates whose lambda1 differ by less than this are tied; ties are
# broken toward the smaller |lambda2| (less helper effort downstream).
_TIE_TOL = 1e-12


@dataclass
class AllocationProblem:
    v1: np.ndarray
    v2: np.ndarray
    r: float
    b: float

    def __post_init__(self):
        self.v1 = np.asarray(self.v1, dtype=float)
        self.v2 = np.asarray(self.v2, dtype=float)
        self.r = float(self.r)
        self.b = float(self.b)
        if self.r <= 0.0 or self.b <= 0.0:
            raise ValueError(f"r and b must be positive, got r={self.r}, b={self.b}")
        n1 = float(np.linalg.norm(self.v1))
        if n1 == 0.0:
            raise ValueError("v1 must be nonzero")
        if abs(float(np.linalg.norm(self.v2)) - 1.0) >= 1e-12:
            raise ValueError("v2 must be a unit vector")


@dataclass
class AllocationSolution:
    lambda1: float
    lambda2: float
    v_r: np.ndarray
    feasible: bool


def _quadratic_roots(p: float, q: float) -> tuple[float, float] | None:
    """Real roots of x^2 + 2 p x + q = 0, or None; numerically stable form."""
    disc = p * p - q
    if disc < 0.0:
        return None
    sq = math.sqrt(disc)
    # Avoid cancellation: compute the large-magnitude root first.
    x1 = -(p + sq) if p >= 0.0 else -(p - sq)
    x2 = q / x1 if x1 != 0.0 else -p + sq
    return x1, x2


def is_feasible(p: AllocationProblem) -> bool:
    """True iff some point of the box satisfies the norm-r equality.

    r <= b always suffices (witness lambda1 = 0, lambda2 = r); beyond that
    the corner maximum of the quadratic form decides.
    """
    if p.r <= p.b:
        return True
    a = float(p.v1 @ p.v1)
    c = float(p.v1 @ p.v2)
    return p.r**2 <= a + 2.0 * abs(c) * p.b + p.b**2


def _candidates(a: float, c: float, r: float, b: float) -> list[tuple[float, float]]:
    cands: list[tuple[float, float]] = []
    if r <= b:
        cands.append((0.0, r))
    # Full lambda1: roots of lambda2^2 + 2 c lambda2 + (a - r^2) = 0.
    roots = _quadratic_roots(c, a - r * r)
    if roots is not None:
        cands.extend((1.0, l2) for l2 in roots if abs(l2) <= b)
    # Rightmost point of the ellipse (vertical tangent).
    det = a - c * c
    if det > 0.0:
        l1 = r / math.sqrt(det)
        l2 = -c * l1
        if l1 <= 1.0 and abs(l2) <= b:
            cands.append((l1, l2))
    # Box edges lambda2 = +/-b: roots of a l1^2 + 2 c e l1 + (e^2 - r^2) = 0.
    for e in (b, -b):
        roots = _quadratic_roots(c * e / a, (e * e - r * r) / a)
        if roots is not None:
            cands.extend((l1, e) for l1 in roots if 0.0 <= l1 <= 1.0)
    return cands


def solve_analytic(p: AllocationProblem) -> AllocationSolution:
    """Maximal-lambda1 solution in closed form.

    Returns feasible=False with a zero solution when no point of the box
    meets the equality constraint (callers treat that as "hold").
    """
    a = float(p.v1 @ p.v1)
    c = float(p.v1 @ p.v2)
    cands = _candidates(a, c, p.r, p.b)
    if not cands:
        return AllocationSolution(0.0, 0.0, p.v2.copy(), feasible=False)
    l1_best = max(t[0] for t in cands)
    tied = [t for t in cands if t[0] >= l1_best - _TIE_TOL]
    l1, l2 = min(tied, key=lambda t: abs(t[1]))
    z = l1 * p.v1 + l2 * p.v2
    nz = float(np.linalg.norm(z))
    v_r = z / nz if nz > 0.0 else p.v2.copy()
    return AllocationSolution(l1, l2, v_r, feasible=True)


def solve_bruteforce(p: AllocationProblem, grid_n: int = 10_000) -> AllocationSolution:
    """Grid-search oracle: scan lambda1 from 1 down to 0 in steps of 1/grid_n.

    At each grid value, the equality constraint is a quadratic in lambda2;
    the first lambda1 whose quadratic has a root inside [-b, b] wins.
    Accuracy in lambda1 is 1/grid_n.
    """
    if grid_n < 100:
        raise ValueError(f"grid_n must be at least 100, got {grid_n}")
    a = float(p.v1 @ p.v1)
    c = float(p.v1 @ p.v2)
    l1 = np.linspace(1.0, 0.0, grid_n + 1)
    disc = (c * c - a) * l1 * l1 + p.r**2
    sq = np.sqrt(np.maximum(disc, 0.0))
    lo = -c * l1 - sq
    hi = -c * l1 + sq
    ok_lo = (disc >= 0.0) & (np.abs(lo) <= p.b)
    ok_hi = (disc >= 0.0) & (np.abs(hi) <= p.b)
    hit = ok_lo | ok_hi
    if not hit.any():
        return AllocationSolution(0.0, 0.0, p.v2.copy(), feasible=False)
    i = int(np.argmax(hit))
    choices = [x for x, ok in ((lo[i], ok_lo[i]), (hi[i], ok_hi[i])) if ok]
    l2 = min(choices, key=abs)
    z = l1[i] * p.v1 + l2 * p.v2
    nz = float(np.linalg.norm(z))
    v_r = z / nz if nz > 0.0 else p.v2.copy()
    return AllocationSolution(float(l1[i]), float(l2), v_r, feasible=True)
