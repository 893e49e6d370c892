"""Plant-side storage certificate: Lyapunov weight P1 and decay rate tau1."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg

from ..common.errors import NumericError, PreconditionError
from ..common.linalg import as_matrix, max_sym_eig, min_sym_eig, spectral_abscissa, symmetrize
from .compact import CompactPlant

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PassivityCertificate:
    """``Ap'P1 + P1 Ap + tau1 P1 <= 0`` with the largest eigenvalue as ``residual``.

    ``kyp_residual`` is ``||P1 B - C'||``; the storage is a true supply-rate
    storage for the port ``(u, y)`` only when it vanishes.
    """

    P1: np.ndarray
    tau1: float
    residual: float
    kyp_residual: float
    spectral_bound: float
    source: str = "lyapunov"

    @property
    def kyp_coupled(self) -> bool:
        return self.kyp_residual <= 1e-9 * max(1.0, float(np.max(np.abs(self.P1))))


def decay_bound(plant: CompactPlant) -> float:
    """Upper limit ``2 min(-Re eig(Ap))`` for admissible rates."""
    return -2.0 * spectral_abscissa(plant.Ap)


def _slack(plant: CompactPlant, P1: np.ndarray, tau1: float) -> float:
    Ap = plant.Ap
    return max_sym_eig(Ap.T @ P1 + P1 @ Ap + tau1 * P1)


def _kyp_residual(plant: CompactPlant, P1: np.ndarray) -> float:
    if plant.B.size == 0:
        return 0.0
    return float(np.linalg.norm(P1 @ plant.B - plant.C.T, ord=2))


def passivity_certificate(plant: CompactPlant, tau1: float) -> PassivityCertificate:
    """Solve the tau1/2-shifted Lyapunov equation with right-hand side ``-I``.

    Args:
        plant: Compact plant with Hurwitz ``Ap``
        tau1: Requested decay rate

    Returns:
        Certificate with the solved ``P1`` and its dissipation slack

    Raises:
        PreconditionError: ``tau1`` outside ``(0, 2 min(-Re eig(Ap)))``
        NumericError: Lyapunov solve failed or returned an indefinite matrix
    """
    bound = decay_bound(plant)
    if not 0.0 < tau1 < bound:
        raise PreconditionError(
            f"tau1={tau1} outside (0, {bound:.6g}); bound is 2*min(-Re eig(Ap))", bound=bound
        )

    n = plant.dims.n
    shifted = plant.Ap + 0.5 * tau1 * np.eye(n)
    try:
        # solve_continuous_lyapunov(a, q) solves a X + X a^H = q
        P1 = linalg.solve_continuous_lyapunov(shifted.T, -np.eye(n))
    except (linalg.LinAlgError, ValueError) as e:
        raise NumericError(f"shifted Lyapunov solve failed: {e}") from e
    if not np.all(np.isfinite(P1)):
        raise NumericError("shifted Lyapunov solve returned non-finite entries")
    P1 = symmetrize(P1)
    if min_sym_eig(P1) <= 0.0:
        raise NumericError(f"P1 not positive definite (min eig {min_sym_eig(P1):.3e})")

    cert = PassivityCertificate(
        P1=P1,
        tau1=float(tau1),
        residual=_slack(plant, P1, tau1),
        kyp_residual=_kyp_residual(plant, P1),
        spectral_bound=bound,
    )
    logger.debug(
        f"Passivity certificate tau1={tau1:.4g}, slack={cert.residual:.3e}, "
        f"kyp={cert.kyp_residual:.3e}"
    )
    return cert


def max_storage_rate(plant: CompactPlant, P1: np.ndarray) -> float:
    """Largest ``tau1`` with ``Ap'P1 + P1 Ap + tau1 P1 <= 0`` for a fixed ``P1``."""
    Ap = plant.Ap
    dissipation = -symmetrize(Ap.T @ P1 + P1 @ Ap)
    return float(linalg.eigh(dissipation, symmetrize(P1), eigvals_only=True)[0])


def storage_certificate(
    plant: CompactPlant, P1: Optional[np.ndarray] = None, tau1: Optional[float] = None
) -> PassivityCertificate:
    """Certify a caller-supplied storage weight (default: the plant's physical one).

    Args:
        plant: Compact plant
        P1: Storage weight; falls back to ``plant.storage_weight``
        tau1: Rate to certify; defaults to the largest admissible one

    Raises:
        PreconditionError: No weight available, weight indefinite, or rate too large
    """
    if P1 is None:
        P1 = plant.storage_weight
    if P1 is None:
        raise PreconditionError("plant carries no storage weight")
    P1 = symmetrize(as_matrix(P1, rows=plant.dims.n, cols=plant.dims.n, name="P1"))
    if min_sym_eig(P1) <= 0.0:
        raise PreconditionError(f"storage weight not positive definite ({min_sym_eig(P1):.3e})")

    rate = max_storage_rate(plant, P1)
    if rate <= 0.0:
        raise PreconditionError(f"storage weight is not strictly dissipative (rate {rate:.3e})",
                                bound=rate)
    if tau1 is None:
        tau1 = rate
    elif tau1 > rate:
        raise PreconditionError(f"tau1={tau1} exceeds the storage's rate {rate:.6g}", bound=rate)

    return PassivityCertificate(
        P1=P1,
        tau1=float(tau1),
        residual=_slack(plant, P1, tau1),
        kyp_residual=_kyp_residual(plant, P1),
        spectral_bound=decay_bound(plant),
        source="storage",
    )


def certify_storage(
    plant: CompactPlant, tau1: Optional[float] = None, tau1_fraction: float = 0.5
) -> PassivityCertificate:
    """Storage certificate for a plant as the pipeline uses it.

    A plant carrying a physical storage weight is certified with that weight.
    Otherwise ``P1`` is Lyapunov-solved at ``tau1``, or at ``tau1_fraction`` of
    the admissible rate when ``tau1`` is not given.

    Raises:
        PreconditionError: ``tau1_fraction`` outside ``(0, 1)`` or ``tau1`` inadmissible
    """
    if not 0.0 < tau1_fraction < 1.0:
        raise PreconditionError(f"tau1_fraction must lie in (0, 1), got {tau1_fraction}")
    if plant.storage_weight is not None:
        try:
            return storage_certificate(plant, tau1=tau1)
        except PreconditionError as e:
            if tau1 is not None:
                raise
            logger.warning(f"Physical storage weight rejected ({e}); solving for P1 instead")
    if tau1 is None:
        tau1 = tau1_fraction * decay_bound(plant)
    return passivity_certificate(plant, tau1)
