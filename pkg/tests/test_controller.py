"""Tests for the penalty, gain synthesis and controller vector field."""

import math

import numpy as np
import pytest

from pdgd_ftc.common.errors import DimensionError, PreconditionError
from pdgd_ftc.controller import (
    ControllerField,
    ControllerState,
    clip_multiplier,
    controller_gains,
    controller_rhs,
    gain_bounds,
    gains_report,
    metric_matrix,
    penalty_h,
    port_selectors,
    synthesize_params,
)
from pdgd_ftc.program import ConstraintTemplate, assemble_program, solve_oracle


@pytest.fixture
def boxed_program(scalar_plant, scalar_program):
    """Scalar benchmark with an active input ceiling ``u <= 0.2``."""
    return assemble_program(scalar_plant, [ConstraintTemplate.box_u(1, {0: 0.2}, m=1)],
                            scalar_program.cost)


class TestPenalty:
    """Test the augmented-Lagrangian penalty."""

    def test_branches(self):
        assert penalty_h(1.0, 2.0, 1.0) == (2.5, 3.0, 1.0)
        value, da, db = penalty_h(-3.0, 1.0, 1.0)
        assert value == pytest.approx(-0.5)
        assert da == 0.0
        assert db == pytest.approx(-1.0)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(0)
        step = 1e-6
        checked = 0
        while checked < 1000:
            a, b = rng.uniform(-5.0, 5.0, size=2)
            rho = rng.uniform(0.1, 5.0)
            if abs(rho * a + b) < 1e-4:
                continue
            _, da, db = penalty_h(a, b, rho)
            fd_a = (penalty_h(a + step, b, rho)[0] - penalty_h(a - step, b, rho)[0]) / (2 * step)
            fd_b = (penalty_h(a, b + step, rho)[0] - penalty_h(a, b - step, rho)[0]) / (2 * step)
            assert abs(da - fd_a) <= 1e-5
            assert abs(db - fd_b) <= 1e-5
            checked += 1

    def test_continuous_across_switching_line(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            a, rho = rng.uniform(-5.0, 5.0), rng.uniform(0.1, 5.0)
            b = -rho * a
            upper = a * b + 0.5 * rho * a * a
            lower = -b * b / (2.0 * rho)
            assert abs(upper - lower) <= 1e-12 * max(1.0, abs(upper))
            assert penalty_h(a, b, rho)[0] == pytest.approx(upper, abs=1e-12)

    def test_convex_in_first_argument(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            a1, a2, b = rng.uniform(-5.0, 5.0, size=3)
            rho = rng.uniform(0.1, 5.0)
            mid = penalty_h(0.5 * (a1 + a2), b, rho)[0]
            assert mid <= 0.5 * (penalty_h(a1, b, rho)[0] + penalty_h(a2, b, rho)[0]) + 1e-12

    def test_rho_positive(self):
        with pytest.raises(PreconditionError):
            penalty_h(1.0, 1.0, 0.0)

    def test_clip_fixed_point_at_oracle(self, boxed_program):
        point = solve_oracle(boxed_program)
        g = clip_multiplier(boxed_program, point.xi, point.nu_ineq, rho=1.0)
        np.testing.assert_allclose(g, point.nu_ineq, atol=1e-12)

    def test_clip_at_zero(self, boxed_program):
        g = clip_multiplier(boxed_program, np.zeros(3), np.zeros(1), rho=1.0)
        np.testing.assert_array_equal(g, [0.0])


class TestGainBounds:
    """Test the metric lower bounds."""

    def test_large_eta_branch(self):
        bounds = gain_bounds(2.0, 1.0, 0.5, 1.0, 3.0, 1.0, 1.0)
        assert bounds.c1 == pytest.approx(2.0 * math.sqrt(3.0 / (1.5 * 0.5)))
        assert bounds.c2 == pytest.approx(3.0)
        assert bounds.c3 == pytest.approx(20.0 * 1.0 * 9.0 * 4.0 * 3.0)
        assert bounds.required == bounds.c3

    def test_small_eta_branch(self):
        bounds = gain_bounds(0.5, 1.0, 0.5, 1.0, 2.0, 1.0, 1.0)
        assert bounds.c1 == pytest.approx(math.sqrt(0.5 * 2.0 / (0.5 * 0.75)))

    def test_violations_listed(self):
        bounds = gain_bounds(2.0, 1.0, 0.5, 1.0, 3.0, 1.0, 1.0)
        assert bounds.violated_by(3.5) == ("c1", "c3")
        assert bounds.violated_by(bounds.required) == ()

    @pytest.mark.parametrize("eta,rho,epsilon", [
        (0.0, 1.0, 0.5),
        (1.0, -1.0, 0.5),
        (1.0, 1.0, 0.0),
        (1.0, 1.0, 1.0),
    ])
    def test_out_of_range(self, eta, rho, epsilon):
        with pytest.raises(PreconditionError):
            gain_bounds(eta, rho, epsilon, 1.0, 1.0, 1.0, 1.0)


class TestControllerGains:
    """Test synthesized gains on the scalar benchmark."""

    def test_metric_scalar_is_largest_bound(self, scalar_params):
        assert scalar_params.c == pytest.approx(max(scalar_params.c1, scalar_params.c2,
                                                    scalar_params.c3))
        assert scalar_params.kappa1 == pytest.approx(1.0)
        assert scalar_params.kappa2 == pytest.approx(3.0)

    def test_c3_from_cost_constants(self, scalar_params):
        mu, ell = scalar_params.mu, scalar_params.ell
        assert mu == pytest.approx((3.0 - math.sqrt(5.0)) / 2.0)
        assert ell == pytest.approx((3.0 + math.sqrt(5.0)) / 2.0)
        q_rho = max(3.0 / mu, ell / mu)
        q_eta = max(2.1 / ell, ell / mu)
        assert scalar_params.c3 == pytest.approx(20.0 * ell * q_rho ** 2 * q_eta ** 2 * 3.0)

    def test_metric_floor(self, scalar_params):
        P2 = scalar_params.P2
        np.testing.assert_array_equal(P2, P2.T)
        floor = scalar_params.epsilon * scalar_params.c * min(scalar_params.eta, 1.0)
        assert scalar_params.lambda_min_P2 >= floor - 1e-9

    def test_port_matrix_identity(self, scalar_params):
        np.testing.assert_allclose(2.0 * scalar_params.Bpd.T @ scalar_params.P2,
                                   scalar_params.Mu, atol=1e-10)

    def test_decay_rate(self, scalar_params):
        assert scalar_params.tau2 == pytest.approx(2.1 / (2.0 * scalar_params.c))

    def test_override_below_bound(self, scalar_program):
        with pytest.raises(PreconditionError) as exc:
            controller_gains(scalar_program, eta=2.1, override_c=1.0)
        assert exc.value.bound is not None

    def test_override_above_bound(self, scalar_program, scalar_params):
        params = controller_gains(scalar_program, eta=2.1, override_c=2.0 * scalar_params.c)
        assert params.c == pytest.approx(2.0 * scalar_params.c)

    def test_selectors(self, scalar_program):
        Mu, My = port_selectors(scalar_program.layout, scalar_program.n_c)
        np.testing.assert_array_equal(Mu, [[0.0, 0.0, 1.0, 0.0, 0.0]])
        np.testing.assert_array_equal(My, [[0.0, 1.0, 0.0, 0.0, 0.0]])

    def test_metric_layout(self):
        P2 = metric_matrix(np.array([[1.0, 2.0]]), 2, eta=3.0, c=5.0)
        np.testing.assert_array_equal(P2, [[15.0, 0.0, 3.0], [0.0, 15.0, 6.0], [3.0, 6.0, 5.0]])

    def test_undersized_metric_allowed(self, stiff_program):
        params = synthesize_params(stiff_program, eta=1.0, rho=1.0, epsilon=0.5, c=1.0)
        assert params.c == 1.0
        assert params.c < params.c3

    def test_report_keys(self, scalar_params):
        report = gains_report(scalar_params)
        assert {"eta", "rho", "epsilon", "c1", "c2", "c3", "c", "tau2", "cond_P2"} <= set(report)


class TestControllerField:
    """Test the augmented primal-dual vector field."""

    def test_zero_at_scalar_optimum(self, scalar_program, scalar_params):
        state = ControllerState.from_kkt(solve_oracle(scalar_program))
        rhs = controller_rhs(scalar_params, scalar_program, state)
        assert np.max(np.abs(rhs)) <= 1e-8

    def test_zero_at_active_optimum(self, boxed_program):
        params = controller_gains(boxed_program, eta=2.1)
        point = solve_oracle(boxed_program)
        rhs = controller_rhs(params, boxed_program, point.stacked())
        assert np.max(np.abs(rhs)) <= 1e-8

    def test_zero_at_random_optima(self, random_program):
        rng = np.random.default_rng(4)
        for _ in range(20):
            program = random_program(rng)
            params = controller_gains(program, eta=1.5)
            point = solve_oracle(program)
            rhs = controller_rhs(params, program, point.stacked())
            assert np.max(np.abs(rhs)) <= 1e-8 * max(1.0, np.max(np.abs(point.stacked())))

    def test_input_channel(self, scalar_program, scalar_params):
        theta = np.zeros(scalar_params.n_theta)
        free = controller_rhs(scalar_params, scalar_program, theta)
        forced = controller_rhs(scalar_params, scalar_program, theta, v_pd=[1.0])
        np.testing.assert_allclose(forced - free, scalar_params.Bpd[:, 0], atol=1e-12)

    def test_state_round_trip(self, scalar_program):
        theta = np.arange(5, dtype=float)
        state = ControllerState.from_vector(theta, scalar_program)
        np.testing.assert_array_equal(state.xi, [0.0, 1.0, 2.0])
        np.testing.assert_array_equal(state.nu_eq, [3.0, 4.0])
        assert state.nu_ineq.shape == (0,)
        np.testing.assert_array_equal(state.stacked(), theta)

    def test_zeros(self, scalar_program):
        assert ControllerState.zeros(scalar_program).size == 5

    def test_mismatched_params(self, boxed_program, scalar_params):
        with pytest.raises(DimensionError):
            ControllerField(scalar_params, boxed_program)

    def test_wrong_theta_length(self, scalar_program, scalar_params):
        with pytest.raises(DimensionError):
            controller_rhs(scalar_params, scalar_program, np.zeros(4))
