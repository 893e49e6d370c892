"""Tests for the metric floor, shifted dynamics, vertex inequality and margin chain."""

import itertools

import numpy as np
import pytest

from pdgd_ftc.certificate import (
    RATIO_FLOOR,
    GammaDiag,
    delta_margin,
    gamma_diag,
    p2_floor,
    program_hessian,
    q_certificate,
    q_matrix,
    run_certificates,
    sample_hessians,
    shifted_matrix,
    vertex_inequality,
    vertex_margin,
)
from pdgd_ftc.common.errors import DimensionError, PreconditionError, UnsupportedError
from pdgd_ftc.common.status import Verdict
from pdgd_ftc.controller import ControllerField, controller_gains, synthesize_params
from pdgd_ftc.program import (
    CallbackCost,
    ConstraintTemplate,
    Layout,
    SteadyStateProgram,
    assemble_program,
)


@pytest.fixture
def boxed_program(scalar_plant, scalar_program):
    return assemble_program(scalar_plant, [ConstraintTemplate.box_u(1, {0: 0.2}, m=1)],
                            scalar_program.cost)


@pytest.fixture
def undersized(stiff_program):
    """Metric scalar ``c = kappa2 * rho`` on a program with ``ell / mu = 10``."""
    return synthesize_params(stiff_program, eta=1.0, rho=1.0, epsilon=0.5, c=1.0)


class TestFloor:
    """Test the metric lower bound."""

    def test_nonnegative_for_synthesized_gains(self, scalar_params):
        assert p2_floor(scalar_params) >= -1e-9

    def test_random_programs(self, random_program):
        rng = np.random.default_rng(8)
        for _ in range(10):
            program = random_program(rng)
            for eta in (0.5, 1.0, 3.0):
                assert p2_floor(controller_gains(program, eta=eta)) >= -1e-9

    def test_negative_for_undersized_metric(self, undersized):
        assert p2_floor(undersized) == pytest.approx(-0.5)


class TestGammaDiag:
    """Test the switching weights of the clipped multiplier."""

    def test_max_identity(self):
        rng = np.random.default_rng(9)
        phi = rng.uniform(-1.0, 1.0, size=1_000_000)
        phi_bar = rng.uniform(-1.0, 1.0, size=1_000_000)
        gamma = gamma_diag(phi, phi_bar).gamma
        lhs = np.maximum(phi, 0.0) - np.maximum(phi_bar, 0.0)
        assert np.max(np.abs(lhs - gamma * (phi - phi_bar))) <= 1e-12
        assert np.all((gamma >= 0.0) & (gamma <= 1.0))

    def test_branches(self):
        diag = gamma_diag([1.0, -1.0, 2.0, -1.0], [3.0, -2.0, -2.0, 3.0])
        np.testing.assert_allclose(diag.gamma, [1.0, 0.0, 0.5, 0.75])

    def test_block_forms(self):
        diag = GammaDiag.from_weights([0.25])
        np.testing.assert_array_equal(diag.gamma1(2), np.diag([1.0, 1.0, 0.25]))
        np.testing.assert_array_equal(diag.gamma2(2), np.diag([0.0, 0.0, 0.25]))

    def test_weights_in_unit_interval(self):
        with pytest.raises(DimensionError):
            GammaDiag.from_weights([1.5])


class TestShiftedDynamics:
    """Test the error dynamics and the dissipation matrix ``Q``."""

    def test_difference_is_linear_in_gamma(self, boxed_program):
        params = controller_gains(boxed_program, eta=2.1)
        field = ControllerField(params, boxed_program)
        H = program_hessian(boxed_program)
        rng = np.random.default_rng(10)
        for _ in range(50):
            theta = rng.standard_normal(params.n_theta)
            theta_bar = rng.standard_normal(params.n_theta)
            diag = gamma_diag(field.phi(theta), field.phi(theta_bar))
            F = shifted_matrix(params, boxed_program, H, diag)
            diff = field(theta) - field(theta_bar)
            np.testing.assert_allclose(diff, F @ (theta - theta_bar), atol=1e-8)

    def test_gamma_size_checked(self, boxed_program):
        params = controller_gains(boxed_program, eta=2.1)
        with pytest.raises(DimensionError):
            shifted_matrix(params, boxed_program, program_hessian(boxed_program), [0.5, 0.5])

    def test_equality_only_q_is_psd(self, scalar_program, scalar_params):
        report = q_certificate(scalar_params, scalar_program, samples=100, seed=0)
        assert report.verdict is Verdict.PASS
        assert report.evaluations == 1

    def test_boxed_q_is_psd(self, boxed_program):
        params = controller_gains(boxed_program, eta=2.1)
        report = q_certificate(params, boxed_program, samples=100, seed=1, random_hessians=3)
        assert report.verdict is Verdict.PASS

    def test_undersized_metric_breaks_q(self, stiff_program, undersized):
        Q, lam = q_matrix(undersized, stiff_program, program_hessian(stiff_program), [0.0])
        assert Q[0, 0] == pytest.approx(-2.3)
        assert lam <= -2.3 + 1e-12
        report = q_certificate(undersized, stiff_program, samples=10, seed=0)
        assert report.verdict is Verdict.FAIL
        assert report.min_eig < 0.0

    def test_hessian_outside_bounds(self, scalar_program, scalar_params):
        with pytest.raises(PreconditionError):
            q_matrix(scalar_params, scalar_program, 10.0 * np.eye(3), np.zeros(0))

    def test_sampled_hessians_in_bounds(self):
        rng = np.random.default_rng(12)
        stream = sample_hessians(rng, 4, 0.5, 3.0)
        for _ in range(50):
            eig = np.linalg.eigvalsh(next(stream))
            assert eig[0] >= 0.5 - 1e-12
            assert eig[-1] <= 3.0 + 1e-12

    def test_program_hessian_needs_quadratic(self):
        program = SteadyStateProgram(
            R_eq=np.zeros((0, 1)), b=[], R_ineq=np.zeros((0, 1)), h=[],
            cost=CallbackCost(1, lambda xi: float(xi @ xi), lambda xi: 2.0 * xi, 2.0, 2.0),
            layout=Layout(n=0, p=0, m=1),
        )
        with pytest.raises(UnsupportedError):
            program_hessian(program)


class TestVertexInequality:
    """Test the vertex inequality over ``{0, 1}^n_c``."""

    def test_scalar_exhaustive(self, scalar_program, scalar_params):
        report = vertex_inequality(scalar_program.R, scalar_params.eta, scalar_params.rho,
                                   scalar_params.c)
        assert report.verdict is Verdict.PASS
        assert report.exhaustive
        assert report.checked == 4

    def test_random_rows_at_tight_metric(self):
        rng = np.random.default_rng(13)
        R = rng.standard_normal((12, 15))
        kappa2 = float(np.linalg.eigvalsh(R @ R.T)[-1])
        report = vertex_inequality(R, eta=1.3, rho=1.0, c=kappa2)
        assert report.exhaustive
        assert report.checked == 4096
        assert report.verdict is Verdict.PASS

    def test_small_metric_fails(self):
        report = vertex_inequality(np.eye(3), eta=1.0, rho=1.0, c=0.1)
        assert report.verdict is Verdict.FAIL
        assert 0 in report.worst_vertex
        assert report.worst_margin == pytest.approx(-1.3)
        assert vertex_margin(np.eye(3), np.zeros(3), 1.0, 1.0, 0.1) == pytest.approx(-1.3)

    def test_sampled_above_cap(self):
        R = np.eye(4)
        report = vertex_inequality(R, eta=1.0, rho=1.0, c=2.0, cap=2, samples=50, seed=3)
        assert not report.exhaustive
        assert report.checked == 52
        assert report.verdict is Verdict.NON_EXHAUSTIVE
        assert report.to_dict()["verdict"] == "non_exhaustive"

    def test_parallel_matches_serial(self):
        rng = np.random.default_rng(14)
        R = rng.standard_normal((12, 14))
        serial = vertex_inequality(R, eta=2.0, rho=0.5, c=1.0, workers=1)
        parallel = vertex_inequality(R, eta=2.0, rho=0.5, c=1.0, workers=3)
        assert serial.worst_vertex == parallel.worst_vertex
        assert serial.worst_margin == parallel.worst_margin

    def test_positive_gains_required(self):
        with pytest.raises(PreconditionError):
            vertex_inequality(np.eye(2), eta=0.0, rho=1.0, c=1.0)


class TestMarginChain:
    """Test the scalar margin showing the metric bound leaves slack."""

    def test_floor_attained_at_unit_parameters(self):
        report = delta_margin(1.0, 1.0, 1.0, 1.0, 1.0, 1.0)
        assert report.c_o == pytest.approx(20.0)
        assert report.ratio == pytest.approx(RATIO_FLOOR, abs=1e-12)
        assert report.positive

    def test_parameter_grid(self):
        grid = itertools.product(
            (0.5, 1.0, 2.0, 5.0),
            (0.5, 1.0, 2.0),
            ((1.0, 1.0), (0.5, 2.0), (0.1, 1.0)),
            ((1.0, 1.0), (1.0, 3.0), (0.5, 4.0)),
        )
        count = 0
        for eta, rho, (mu, ell), (kappa1, kappa2) in grid:
            report = delta_margin(eta, rho, mu, ell, kappa1, kappa2)
            assert report.positive
            assert report.ratio >= RATIO_FLOOR - 1e-9
            count += 1
        assert count == 108

    def test_ordering_enforced(self):
        with pytest.raises(PreconditionError):
            delta_margin(1.0, 1.0, 2.0, 1.0, 1.0, 1.0)
        with pytest.raises(PreconditionError):
            delta_margin(1.0, 1.0, 1.0, 1.0, 2.0, 1.0)
        with pytest.raises(PreconditionError):
            delta_margin(0.0, 1.0, 1.0, 1.0, 1.0, 1.0)


class TestCertificateSuite:
    """Test the combined certificate run."""

    def test_scalar_passes(self, scalar_program, scalar_params):
        summary = run_certificates(scalar_params, scalar_program, q_samples=20)
        assert summary.passed
        assert set(summary.verdicts) == {"p2_floor", "q_matrix", "vertex", "delta"}
        assert summary.to_dict()["verdicts"]["vertex"] == "pass"

    def test_undersized_metric_fails(self, stiff_program, undersized):
        summary = run_certificates(undersized, stiff_program, q_samples=5)
        assert not summary.passed
        assert {"p2_floor", "q_matrix"} <= set(summary.failures())

    def test_callback_cost_skips_q(self):
        program = SteadyStateProgram(
            R_eq=np.array([[1.0, -1.0]]), b=[0.0], R_ineq=np.zeros((0, 2)), h=[],
            cost=CallbackCost(2, lambda xi: float(xi @ xi), lambda xi: 2.0 * xi, 2.0, 2.0),
            layout=Layout(n=0, p=1, m=1),
        )
        params = controller_gains(program, eta=1.5)
        summary = run_certificates(params, program, q_samples=5)
        assert summary.verdicts["q_matrix"] is Verdict.SKIPPED
        assert summary.q_min_eig is None
        assert summary.passed
