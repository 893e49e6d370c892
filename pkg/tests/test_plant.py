"""Tests for subsystems, interconnection and the compact plant."""

import numpy as np
import pytest

from pdgd_ftc.common.errors import DimensionError, PreconditionError, StructuralError
from pdgd_ftc.plant import (
    InterconnectionMap,
    Subsystem,
    assemble_plant,
    passivity_certificate,
    plant_rhs,
    steady_state,
    storage_certificate,
    validate_interconnection,
)


def scalar_pair(omega12=1.0, omega21=-1.0):
    subs = [
        Subsystem(index=k, A=[[-1.0]], B=[[1.0]], C=[[1.0]], E=[[1.0]], G=[[1.0]])
        for k in (1, 2)
    ]
    imap = InterconnectionMap.from_blocks({(1, 2): [[omega12]], (2, 1): [[omega21]]}, 2)
    return subs, imap


class TestSubsystem:
    """Test per-subsystem validation."""

    def test_non_hurwitz_rejected(self):
        with pytest.raises(PreconditionError):
            Subsystem(index=1, A=[[0.5]], B=[[1.0]], C=[[1.0]])

    def test_marginal_eigenvalue_rejected(self):
        with pytest.raises(PreconditionError):
            Subsystem(index=1, A=[[0.0, 1.0], [-1.0, 0.0]], B=[[1.0], [0.0]], C=[[1.0, 0.0]])

    def test_non_square_port_rejected(self):
        with pytest.raises(DimensionError):
            Subsystem(index=1, A=-np.eye(2), B=np.eye(2), C=[[1.0, 0.0]])

    def test_empty_interconnection_blocks(self):
        sub = Subsystem(index=1, A=[[-2.0]], B=[[1.0]], C=[[1.0]])
        assert sub.dims.s == 0
        assert sub.dims.q == 0
        assert sub.d.shape == (1,)

    def test_replace_keeps_index(self):
        sub = Subsystem(index=3, A=[[-2.0]], B=[[1.0]], C=[[1.0]])
        changed = sub.replace(A=[[-5.0]])
        assert changed.index == 3
        assert changed.A[0, 0] == -5.0

    def test_replace_unknown_field(self):
        sub = Subsystem(index=1, A=[[-2.0]], B=[[1.0]], C=[[1.0]])
        with pytest.raises(StructuralError):
            sub.replace(K=[[1.0]])


class TestInterconnection:
    """Test the skew-pair check."""

    def test_skew_pair_passes(self):
        subs, imap = scalar_pair()
        report = validate_interconnection(imap, subs)
        assert report.passed
        assert report.checked_pairs == 1

    def test_violation_reported_once(self):
        subs, imap = scalar_pair(omega12=1.0, omega21=1.0)
        report = validate_interconnection(imap, subs)
        assert not report.passed
        assert [v.pair for v in report.violations] == [(1, 2)]
        assert report.violations[0].magnitude == pytest.approx(2.0)

    def test_missing_partner_block(self):
        imap = InterconnectionMap.from_blocks({(1, 2): [[1.0]]}, 2)
        report = validate_interconnection(imap)
        assert not report.passed

    def test_block_shape_checked(self):
        subs, _ = scalar_pair()
        imap = InterconnectionMap.from_blocks(
            {(1, 2): [[1.0, 0.0]], (2, 1): [[-1.0], [0.0]]}, 2
        )
        with pytest.raises(StructuralError):
            validate_interconnection(imap, subs)

    def test_dangling_subsystem(self):
        subs, _ = scalar_pair()
        imap = InterconnectionMap.from_blocks({(1, 3): [[1.0]], (3, 1): [[-1.0]]}, 3)
        with pytest.raises(StructuralError):
            validate_interconnection(imap, subs)

    def test_power_preserving_on_random_vectors(self):
        rng = np.random.default_rng(7)
        block = rng.standard_normal((3, 2))
        subs = [
            Subsystem(index=1, A=-np.eye(3), B=np.eye(3), C=np.eye(3), E=np.eye(3),
                      G=np.eye(3)),
            Subsystem(index=2, A=-np.eye(2), B=np.eye(2), C=np.eye(2), E=np.eye(2),
                      G=np.eye(2)),
        ]
        imap = InterconnectionMap.from_blocks({(1, 2): block, (2, 1): -block.T}, 2)
        plant = assemble_plant(subs, imap)
        for _ in range(100):
            z = rng.standard_normal(plant.dims.s)
            assert abs(z @ plant.Omega @ z) <= 1e-10 * max(1.0, z @ z)


class TestAssemblePlant:
    """Test compact assembly."""

    def test_two_scalar_subsystems(self):
        plant = assemble_plant(*scalar_pair())
        np.testing.assert_array_equal(plant.Ap, [[-1.0, 1.0], [-1.0, -1.0]])
        eig = np.sort_complex(plant.eigenvalues)
        np.testing.assert_allclose(eig, [-1.0 - 1.0j, -1.0 + 1.0j], atol=1e-12)
        assert plant.hurwitz

    def test_reassembly_is_exact(self):
        plant = assemble_plant(*scalar_pair())
        np.testing.assert_array_equal(plant.Ap, plant.A + plant.G @ plant.Omega @ plant.E)

    def test_order_independent(self):
        subs, imap = scalar_pair()
        forward = assemble_plant(subs, imap)
        backward = assemble_plant(list(reversed(subs)), imap)
        np.testing.assert_array_equal(forward.Ap, backward.Ap)

    def test_non_contiguous_indices(self):
        subs = [Subsystem(index=k, A=[[-1.0]], B=[[1.0]], C=[[1.0]]) for k in (1, 3)]
        with pytest.raises(StructuralError):
            assemble_plant(subs, InterconnectionMap.empty(2))

    def test_skew_violation_rejected(self):
        with pytest.raises(StructuralError):
            assemble_plant(*scalar_pair(omega12=1.0, omega21=0.5))

    def test_spectrum_matches_dense_eigensolve(self):
        plant = assemble_plant(*scalar_pair())
        dense = np.sort_complex(np.linalg.eigvals(plant.A + plant.G @ plant.Omega @ plant.E))
        np.testing.assert_allclose(np.sort_complex(plant.eigenvalues), dense, atol=1e-9)

    def test_rhs_and_steady_state(self, scalar_plant):
        np.testing.assert_allclose(plant_rhs(scalar_plant, [2.0], [1.0]), [-1.0])
        x = steady_state(scalar_plant, [0.5])
        np.testing.assert_allclose(x, [0.5])
        np.testing.assert_allclose(plant_rhs(scalar_plant, x, [0.5]), [0.0], atol=1e-12)

    def test_rhs_dimension_checked(self, scalar_plant):
        with pytest.raises(DimensionError):
            plant_rhs(scalar_plant, [1.0, 2.0], [0.0])


class TestPassivityCertificate:
    """Test the shifted Lyapunov certificate."""

    def test_identity_weight_for_rotation_plant(self):
        plant = assemble_plant(*scalar_pair())
        cert = passivity_certificate(plant, tau1=1.0)
        np.testing.assert_allclose(cert.P1, np.eye(2), atol=1e-10)
        assert cert.residual <= 1e-8
        assert cert.spectral_bound == pytest.approx(2.0)

    def test_rate_outside_bound(self):
        plant = assemble_plant(*scalar_pair())
        with pytest.raises(PreconditionError):
            passivity_certificate(plant, tau1=2.5)
        with pytest.raises(PreconditionError):
            passivity_certificate(plant, tau1=0.0)

    def test_slack_nonpositive_for_admissible_rates(self):
        plant = assemble_plant(*scalar_pair())
        for tau1 in (0.1, 0.7, 1.5, 1.9):
            assert passivity_certificate(plant, tau1).residual <= 1e-8

    def test_scalar_weight_is_port_coupled(self, scalar_plant):
        cert = passivity_certificate(scalar_plant, tau1=1.0)
        np.testing.assert_allclose(cert.P1, [[1.0]], atol=1e-12)
        assert cert.kyp_coupled

    def test_storage_certificate_needs_weight(self, scalar_plant):
        with pytest.raises(PreconditionError):
            storage_certificate(scalar_plant)

    def test_storage_certificate_with_given_weight(self, scalar_plant):
        cert = storage_certificate(scalar_plant, P1=[[1.0]])
        assert cert.source == "storage"
        assert cert.tau1 == pytest.approx(2.0)
        assert cert.residual <= 1e-12
