"""Estimator right-hand sides, the error-dynamics identity, and RK4 stepping."""

import numpy as np
import pytest

from adepth.errors import IntegrationError
from adepth.geometry import CameraTwist, feature_dynamics
from adepth.observer import (
    CoupledState,
    EstimatorState,
    ObserverGains,
    error_rhs,
    estimation_error,
    integrate_step,
    observer_rhs,
)

GAINS = ObserverGains(10.0, 2500.0)


def bounded_twist(rng, v_max=0.1, w_max=0.15):
    v = rng.uniform(-1.0, 1.0, size=3)
    v *= rng.uniform(0.0, v_max) / max(np.linalg.norm(v), 1e-12)
    w = rng.uniform(-1.0, 1.0, size=3)
    w *= rng.uniform(0.0, w_max) / max(np.linalg.norm(w), 1e-12)
    return CameraTwist(v, w)


class TestObserverRhs:
    def test_zero_error_reproduces_true_dynamics(self, rng):
        for _ in range(50):
            s = rng.uniform(-1, 1, size=2)
            chi = rng.uniform(0.0, 3.0)
            u = bounded_twist(rng)
            est = EstimatorState(s.copy(), chi)
            s_hat_dot, chi_hat_dot = observer_rhs(s, est, u, GAINS)
            s_dot, chi_dot = feature_dynamics(s, chi, u)
            assert s_hat_dot == pytest.approx(s_dot, abs=1e-15)
            assert chi_hat_dot == pytest.approx(chi_dot, abs=1e-15)

    def test_pure_feedback_term(self):
        est = EstimatorState([0.1, 0.0], 0.0)
        s_hat_dot, chi_hat_dot = observer_rhs(
            [0.0, 0.0], est, CameraTwist.zero(), ObserverGains(10.0, 2500.0)
        )
        assert np.array_equal(s_hat_dot, [-1.0, 0.0])
        assert chi_hat_dot == 0.0

    def test_no_depth_update_without_excitation_coupling(self):
        # s_tilde = 0 and v along x with the feature at the origin: the
        # chi_hat channel sees no correction.
        est = EstimatorState([0.0, 0.0], 0.5)
        _, chi_hat_dot = observer_rhs(
            [0.0, 0.0], est, CameraTwist([0.1, 0, 0], [0, 0, 0]), ObserverGains(10.0, 2500.0)
        )
        assert chi_hat_dot == 0.0

    def test_chi_hat_partial_matches_finite_difference(self, rng):
        # d(chi_hat_dot)/d(chi_hat) = 2 Jq v chi_hat + Jl w
        for _ in range(200):
            s = rng.uniform(-1, 1, size=2)
            u = bounded_twist(rng, v_max=1.0, w_max=1.0)
            chi_hat = rng.uniform(0.0, 3.0)
            est = EstimatorState(rng.uniform(-1, 1, size=2), chi_hat)
            x, y = s
            analytic = 2.0 * u.v[2] * chi_hat + (y * u.w[0] - x * u.w[1])
            h = 1e-6 * max(1.0, abs(chi_hat))
            up = observer_rhs(s, EstimatorState(est.s_hat, chi_hat + h), u, GAINS)[1]
            dn = observer_rhs(s, EstimatorState(est.s_hat, chi_hat - h), u, GAINS)[1]
            numeric = (up - dn) / (2.0 * h)
            assert abs(numeric - analytic) <= 1e-6 * max(1.0, abs(analytic))


class TestErrorRhs:
    def test_equilibrium(self):
        est = EstimatorState([0.4, -0.2], 1.7)
        s_tilde_dot, chi_tilde_dot = error_rhs(
            [0.4, -0.2], 1.7, est, CameraTwist([1, 2, 3], [4, 5, 6]), GAINS
        )
        assert np.array_equal(s_tilde_dot, [0.0, 0.0]) and chi_tilde_dot == 0.0

    def test_pure_decay(self):
        est = EstimatorState([-1.0, 0.0], 1.0)
        s_tilde_dot, chi_tilde_dot = error_rhs(
            [0.0, 0.0], 1.0, est, CameraTwist.zero(), ObserverGains(10.0, 2500.0)
        )
        assert np.array_equal(s_tilde_dot, [-10.0, 0.0]) and chi_tilde_dot == 0.0

    def test_identity_with_true_minus_observer(self, rng):
        worst = 0.0
        for _ in range(2000):
            s = rng.uniform(-1, 1, size=2)
            chi = rng.uniform(0.0, 3.0)
            est = EstimatorState(s + rng.uniform(-0.5, 0.5, size=2), rng.uniform(0.0, 3.0))
            u = bounded_twist(rng)
            sd, cd = feature_dynamics(s, chi, u)
            od, ocd = observer_rhs(s, est, u, GAINS)
            ed, ecd = error_rhs(s, chi, est, u, GAINS)
            worst = max(worst, np.max(np.abs(ed - (sd - od))), abs(ecd - (cd - ocd)))
        assert worst < 1e-12


class TestIntegrateStep:
    def test_fixed_point_at_rest(self):
        state = CoupledState("feature", [0.2, -0.1, 1.5], [0.2, -0.1], 1.5)
        nxt = integrate_step(state, CameraTwist.zero(), GAINS, 0.01)
        assert np.array_equal(nxt.truth, state.truth)
        assert np.array_equal(nxt.s_hat, state.s_hat)
        assert nxt.chi_hat == state.chi_hat

    def test_equilibrium_invariance(self, rng):
        # Zero estimation error stays zero under arbitrary bounded twists.
        state = CoupledState("feature", [0.2, -0.1, 1.5], [0.2, -0.1], 1.5)
        for _ in range(500):
            u = bounded_twist(rng)
            state = integrate_step(state, u, GAINS, 0.005)
            err = estimation_error(state.truth[:2], state.truth[2], state.estimator())
            assert np.max(np.abs(err.s_tilde)) < 1e-9
            assert abs(err.chi_tilde) < 1e-9

    @pytest.mark.parametrize("kind,truth", [("feature", [0.1, 0.05, 1.0]), ("point", [0.1, 0.05, 1.0])])
    def test_fourth_order_refinement(self, kind, truth, rng):
        # Global error vs a dt/100 reference drops ~16x when dt halves.
        if kind == "point":
            truth = [0.1, 0.05, 1.0]
        u = CameraTwist([0.05, -0.03, 0.04], [0.06, 0.05, -0.04])

        def run(dt, T=1.0):
            st = CoupledState(kind, truth, [0.15, 0.0], 0.3)
            for _ in range(int(round(T / dt))):
                st = integrate_step(st, u, GAINS, dt)
            return np.concatenate([st.truth, st.s_hat, [st.chi_hat]])

        ref = run(0.01 / 100)
        e1 = np.linalg.norm(run(0.02) - ref)
        e2 = np.linalg.norm(run(0.01) - ref)
        assert 8.0 < e1 / e2 < 32.0

    def test_chi_hat_clamped_and_flagged(self):
        # A large wrong-signed feature error drives chi_hat far negative
        # within one step; the step must clamp it back to zero and say so.
        state = CoupledState("feature", [0.0, 0.0, 1.0], [-0.5, 0.0], 1e-3)
        nxt = integrate_step(state, CameraTwist([0.1, 0, 0], [0, 0, 0]), GAINS, 0.01)
        assert nxt.chi_hat == 0.0
        assert nxt.chi_clamped

    def test_nonfinite_state_rejected(self):
        state = CoupledState("feature", [np.inf, 0.0, 1.0], [0.0, 0.0], 0.1)
        with np.errstate(invalid="ignore"), pytest.raises(IntegrationError):
            integrate_step(state, CameraTwist.zero(), GAINS, 0.01)

    def test_bad_dt_rejected(self):
        state = CoupledState("feature", [0.1, 0.0, 1.0], [0.1, 0.0], 0.1)
        with pytest.raises(ValueError):
            integrate_step(state, CameraTwist.zero(), GAINS, 0.0)
