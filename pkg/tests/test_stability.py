"""Lyapunov value/rate, excitation measure, and the input-constraint checks."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from adepth.geometry import CameraTwist, jacobians
from adepth.observer import ErrorState, EstimatorState, ObserverGains, error_rhs, estimation_error
from adepth.stability import (
    check_theorem1,
    lyapunov_rate,
    lyapunov_value,
    pe_sigma_squared,
    stability_report,
)

GAINS = ObserverGains(10.0, 2500.0)
coord = st.floats(-2.0, 2.0, allow_nan=False)
vel = st.floats(-0.5, 0.5, allow_nan=False)


class TestLyapunovValue:
    def test_zero_at_equilibrium(self):
        assert lyapunov_value(ErrorState(np.zeros(2), 0.0), 2500.0) == 0.0

    def test_hand_substitution(self):
        V = lyapunov_value(ErrorState(np.array([0.1, 0.0]), 0.5), 2500.0)
        assert V == pytest.approx(0.00505, abs=1e-15)

    def test_quadratic_in_chi_tilde(self):
        V1 = lyapunov_value(ErrorState(np.zeros(2), 0.3), 100.0)
        V2 = lyapunov_value(ErrorState(np.zeros(2), 0.6), 100.0)
        assert V2 == pytest.approx(4.0 * V1, rel=1e-12)

    def test_rejects_bad_gain(self):
        with pytest.raises(ValueError):
            lyapunov_value(ErrorState(np.zeros(2), 0.0), 0.0)


class TestLyapunovRate:
    def test_zero_at_equilibrium(self):
        est = EstimatorState([0.2, 0.1], 1.0)
        assert lyapunov_rate([0.2, 0.1], 1.0, est, CameraTwist([1, 2, 3], [4, 5, 6]), GAINS) == 0.0

    def test_nonpositive_under_constraints(self, rng):
        # v_z <= 0 with chi, chi_hat >= 0 and Jl w <= 0 makes every term of
        # the closed form non-positive.
        for _ in range(500):
            s = rng.uniform(-1, 1, size=2)
            est = EstimatorState(s + rng.uniform(-0.3, 0.3, size=2), rng.uniform(0, 2))
            chi = rng.uniform(0, 2)
            v = np.array([rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), -rng.uniform(0, 0.1)])
            J = jacobians(s)
            w = rng.uniform(-0.15, 0.15, size=3)
            if J.Jl @ w > 0:
                w = -w
            rate = lyapunov_rate(s, chi, est, CameraTwist(v, w), GAINS)
            assert rate <= 1e-15

    def test_matches_chain_rule_on_error_dynamics(self, rng):
        worst = 0.0
        for _ in range(2000):
            s = rng.uniform(-1, 1, size=2)
            chi = rng.uniform(0, 3)
            est = EstimatorState(s + rng.uniform(-0.5, 0.5, size=2), rng.uniform(0, 3))
            v = rng.uniform(-0.1, 0.1, size=3)
            w = rng.uniform(-0.15, 0.15, size=3)
            u = CameraTwist(v, w)
            err = estimation_error(s, chi, est)
            s_tilde_dot, chi_tilde_dot = error_rhs(s, chi, est, u, GAINS)
            chain = float(err.s_tilde @ s_tilde_dot) + err.chi_tilde * chi_tilde_dot / GAINS.k_chi
            worst = max(worst, abs(lyapunov_rate(s, chi, est, u, GAINS) - chain))
        assert worst < 1e-12


class TestPeSigmaSquared:
    def test_zero_velocity(self):
        assert pe_sigma_squared([0.3, -0.2], [0, 0, 0]) == 0.0

    def test_hand_substitution(self):
        assert pe_sigma_squared([0.0, 0.0], [0.1, 0.0, 0.0]) == pytest.approx(0.01, abs=1e-17)

    @given(x=coord, y=coord, vx=vel, vy=vel, vz=vel)
    def test_equals_norm_of_Jv_v(self, x, y, vx, vy, vz):
        v = np.array([vx, vy, vz])
        Jv_v = jacobians([x, y]).Jv @ v
        assert pe_sigma_squared([x, y], v) == pytest.approx(float(Jv_v @ Jv_v), abs=1e-12)

    @given(x=coord, y=coord, angle=st.floats(0.0, 2 * math.pi))
    def test_full_speed_planar_motion_pins_sigma(self, x, y, angle):
        # v_z = 0 and ||v|| = v_max is exactly how the controllers move.
        v_max = 0.1
        v = v_max * np.array([math.cos(angle), math.sin(angle), 0.0])
        assert pe_sigma_squared([x, y], v) == pytest.approx(v_max**2, abs=1e-12)


class TestCheckTheorem1:
    def test_planar_translation_satisfies_all(self):
        rep = check_theorem1([0.4, -0.6], EstimatorState([0.4, -0.6], 0.5),
                             CameraTwist([0.1, 0, 0], [0, 0, 0]))
        assert rep.all_ok()
        assert rep.c2_Jq_v == 0.0
        assert rep.sigma_sq == pytest.approx(0.01, abs=1e-15)
        assert math.isnan(rep.V) and math.isnan(rep.V_dot)

    def test_depth_reducing_spin_passes_c1(self):
        rep = check_theorem1([1.0, 0.0], EstimatorState([1.0, 0.0], 1.0),
                             CameraTwist([0.1, 0, 0], [0, 1.0, 0]))
        assert rep.c1_Jl_w == pytest.approx(-1.0, abs=1e-15)
        assert rep.c1_ok

    def test_zero_estimate_requires_exact_planarity(self):
        rep = check_theorem1([0.1, 0.0], EstimatorState([0.1, 0.0], 0.0),
                             CameraTwist([0, 0, -0.1], [0, 0, 0]))
        assert not rep.c2_ok

    def test_rejects_negative_tolerance(self):
        with pytest.raises(ValueError):
            check_theorem1([0.1, 0.0], EstimatorState([0.1, 0.0], 0.1),
                           CameraTwist.zero(), tol=-1.0)


class TestFullReport:
    def test_populates_lyapunov_channels(self):
        s = np.array([0.2, 0.0])
        est = EstimatorState([0.1, 0.0], 0.1)
        rep = stability_report(s, 1.0, est, CameraTwist([0.1, 0, 0], [0, 0, 0]), GAINS)
        err = estimation_error(s, 1.0, est)
        assert rep.V == pytest.approx(lyapunov_value(err, GAINS.k_chi), rel=1e-15)
        assert rep.V_dot == pytest.approx(
            lyapunov_rate(s, 1.0, est, CameraTwist([0.1, 0, 0], [0, 0, 0]), GAINS), rel=1e-15
        )
        assert rep.all_ok()
