"""Tests for the clustered DC microgrid mapping and its fault scenario."""

import numpy as np
import pytest

from pdgd_ftc.closedloop import lyapunov_monitor, simulate, stability_margin, tune_eta
from pdgd_ftc.common.errors import PreconditionError, StructuralError
from pdgd_ftc.controller import ControllerState, controller_gains
from pdgd_ftc.microgrid import (
    Bus,
    BusKind,
    Line,
    Network,
    apply_fault,
    build_cluster,
    build_microgrid_plant,
    bus_voltages,
    limit_fault,
    oracle_injections,
    physical_residual,
)
from pdgd_ftc.plant import plant_rhs, storage_certificate
from pdgd_ftc.program import kkt_residual, solve_oracle

LABELS = ("i_f_max:2", "v_min:1", "i_f_max:5", "v_min:4", "v_min:3")


def setting(bus_id, cluster):
    return Bus(id=bus_id, cluster=cluster, kind=BusKind.SETTING)


def following(bus_id, cluster, **kwargs):
    params = {"c_f": 0.022, "psi_load": 0.2, "delta_load": 20.0, **kwargs}
    return Bus(id=bus_id, cluster=cluster, kind=BusKind.FOLLOWING, **params)


def line(line_id, a, b, owner=None, r=0.05):
    return Line(id=line_id, from_bus=a, to_bus=b, r=r, l=1.8e-3, owner=owner)


def post_fault_program(fig1):
    program = fig1.program
    for event in fig1.faults:
        program = apply_fault(program, event)
    return program


class TestNetwork:
    """Test topology rules."""

    def test_following_bus_needs_capacitor(self):
        bus = Bus(id=2, cluster=1, kind=BusKind.FOLLOWING)
        with pytest.raises(StructuralError):
            Network([setting(1, 1), bus], [])

    def test_setting_to_setting_line(self):
        with pytest.raises(StructuralError):
            Network([setting(1, 1), setting(2, 2)], [line(1, 1, 2)])

    def test_owner_outside_allowed_clusters(self):
        with pytest.raises(StructuralError) as exc:
            Network([setting(1, 1), following(2, 1), setting(3, 2)], [line(1, 1, 2, owner=2)])
        assert exc.value.offender == 1

    def test_tie_line_to_setting_bus_owned_by_its_cluster(self):
        network = Network([setting(1, 1), following(2, 2), setting(3, 2)],
                          [line(1, 1, 2), line(2, 3, 2)])
        assert network.lines[1].owner == 1
        assert [ln.id for ln in network.tie_lines()] == [1]

    def test_line_parameters_positive(self):
        with pytest.raises(PreconditionError):
            Network([setting(1, 1), following(2, 1)], [line(1, 1, 2, r=0.0)])

    def test_unknown_endpoint(self):
        with pytest.raises(StructuralError):
            Network([setting(1, 1), following(2, 1)], [line(1, 1, 7)])

    def test_cluster_without_setting_bus(self):
        network = Network([setting(1, 1), following(2, 1), following(3, 2)],
                          [line(1, 1, 2), line(2, 2, 3)])
        with pytest.raises(StructuralError):
            build_cluster(network, 2)

    def test_cluster_blocks(self, fig1):
        model = fig1.models[0]
        assert model.setting == (1,)
        assert model.following == (2, 3)
        assert model.lines == (1, 2, 5)
        assert model.tie_lines == (5,)
        np.testing.assert_array_equal(model.B_f, [[-1.0, 1.0, 0.0], [0.0, -1.0, 1.0]])
        np.testing.assert_array_equal(model.B_s, [[1.0, 0.0, 0.0]])
        other = fig1.models[1]
        assert other.foreign_lines == (5,)
        np.testing.assert_array_equal(other.B_ab, [[0.0], [-1.0]])


class TestMicrogridPlant:
    """Test the two-cluster benchmark plant."""

    def test_sizes(self, fig1):
        dims = fig1.plant.dims
        assert (dims.n, dims.m, dims.p) == (9, 6, 6)
        assert fig1.program.n_xi == 21
        assert fig1.program.n_eq == 15
        assert fig1.program.n_ineq == 5

    def test_tie_line_blocks(self, fig1):
        np.testing.assert_array_equal(fig1.plant.Omega, [[0.0, 1.0], [-1.0, 0.0]])

    def test_tie_line_current_conserved(self, fig1):
        rng = np.random.default_rng(21)
        plant = fig1.plant
        for _ in range(10):
            x = rng.standard_normal(plant.dims.n)
            w = plant.Omega @ plant.E @ x
            # cluster 1 state (V2, V3, I1, I2, I5), cluster 2 state (V5, V6, I3, I4)
            assert w[0] == pytest.approx(-x[6])
            assert w[1] == pytest.approx(-x[4])

    def test_weighted_rhs_is_physical(self, fig1):
        rng = np.random.default_rng(22)
        plant, W = fig1.plant, fig1.plant.storage_weight
        for _ in range(10):
            x = 380.0 + rng.standard_normal(plant.dims.n)
            u = 100.0 + rng.standard_normal(plant.dims.m)
            np.testing.assert_allclose(W @ plant_rhs(plant, x, u),
                                       physical_residual(fig1.models, plant, x, u),
                                       rtol=1e-10, atol=1e-8)

    def test_energy_non_increasing(self, fig1):
        plant = fig1.plant
        WA = plant.storage_weight @ plant.Ap
        assert np.max(np.linalg.eigvalsh(0.5 * (WA + WA.T))) <= 1e-9
        assert plant.hurwitz

    def test_output_is_power_conjugate(self, fig1):
        plant = fig1.plant
        assert plant.dims.p == plant.dims.m < plant.dims.n
        np.testing.assert_allclose(plant.storage_weight @ plant.B, plant.C.T,
                                   rtol=1e-12, atol=1e-12)

    def test_storage_certificate(self, fig1):
        cert = storage_certificate(fig1.plant, P1=fig1.plant.storage_weight)
        assert cert.tau1 > 0.0
        assert cert.residual <= 1e-9 * np.max(fig1.plant.storage_weight)

    def test_standalone_cluster_plant(self):
        network = Network([setting(1, 1), following(2, 1)], [line(1, 1, 2)])
        plant, models = build_microgrid_plant(network)
        assert plant.dims.n == 2
        assert plant.dims.s == 0
        assert len(models) == 1


class TestMicrogridProgram:
    """Test limits, targets and the limit faults."""

    def test_limit_rows(self, fig1):
        assert fig1.program.ineq_labels == LABELS
        np.testing.assert_allclose(fig1.program.h, [150.0, -370.0, 150.0, -370.0, -370.0])

    def test_pre_fault_optimum_is_target(self, fig1):
        point = solve_oracle(fig1.program)
        np.testing.assert_allclose(point.xi, fig1.program.cost.target, rtol=1e-8, atol=1e-6)
        np.testing.assert_allclose(point.nu_ineq, 0.0, atol=1e-8)
        injections = oracle_injections(fig1.program, fig1.models, point.xi)
        assert injections == pytest.approx({2: 100.0, 3: 60.0, 5: 90.0, 6: 60.0})

    def test_optimum_balances_the_network(self, fig1):
        point = solve_oracle(fig1.program)
        layout = fig1.program.layout
        residual = physical_residual(fig1.models, fig1.plant, point.xi[layout.x],
                                     point.xi[layout.u])
        np.testing.assert_allclose(residual, 0.0, atol=1e-7)

    def test_fault_rows(self, fig1):
        event = limit_fault(5.0, "v_min", 3, 375.0)
        assert event.row == "v_min:3"
        assert event.value == -375.0
        changed = apply_fault(fig1.program, event)
        assert changed.h[4] == -375.0
        with pytest.raises(PreconditionError):
            limit_fault(1.0, "p_max", 2, 1.0)

    def test_post_fault_optimum_respects_limits(self, fig1):
        program = post_fault_program(fig1)
        np.testing.assert_allclose(program.h[[0, 2]], [40.0, 50.0])
        point = solve_oracle(program)
        assert kkt_residual(program, point).worst <= 1e-6
        injections = oracle_injections(program, fig1.models, point.xi)
        assert injections[2] <= 40.0 + 1e-6
        assert injections[5] <= 50.0 + 1e-6
        voltages = bus_voltages(program, fig1.models, point.xi)
        assert sorted(voltages) == [1, 2, 3, 4, 5, 6]
        assert min(voltages[b] for b in (1, 3, 4)) >= 370.0 - 1e-6


@pytest.mark.slow
class TestMicrogridClosedLoop:
    """Closed-loop run through both limit faults."""

    def test_tracks_post_fault_optimum(self, fig1):
        program = fig1.program
        eta = tune_eta(program, epsilon=0.5)
        params = controller_gains(program, eta=eta, rho=1.0, epsilon=0.5)
        cert = storage_certificate(fig1.plant, P1=fig1.plant.storage_weight)
        margin = stability_margin(params, cert.tau1).require()

        start = solve_oracle(program)
        trace = simulate(fig1.plant, params, program, fig1.faults,
                         x0=start.xi[program.layout.x], theta0=ControllerState.from_kkt(start),
                         dt="auto", T=60.0, record_every=200)
        assert len(trace.events) == 2

        final = solve_oracle(post_fault_program(fig1))
        layout = program.layout
        u_final, u_run = final.xi[layout.u], trace.u[-1]
        assert np.max(np.abs(u_run - u_final)) <= 1e-4 * np.max(np.abs(u_final))
        x_final = final.xi[layout.x]
        assert np.max(np.abs(trace.x[-1] - x_final)) <= 1e-4 * np.max(np.abs(x_final))

        xi_run = np.zeros(layout.size)
        xi_run[layout.x], xi_run[layout.y], xi_run[layout.u] = trace.x[-1], trace.y[-1], u_run
        injections = oracle_injections(program, fig1.models, xi_run)
        assert injections[2] <= 40.0 + 1e-6
        assert injections[5] <= 50.0 + 1e-6
        voltages = bus_voltages(program, fig1.models, xi_run)
        assert min(voltages[b] for b in (1, 3, 4)) >= 370.0 - 1e-6

        report = lyapunov_monitor(trace, cert.P1, tau=margin.tau)
        assert report.monotone
        assert len(report.jumps) == 2
