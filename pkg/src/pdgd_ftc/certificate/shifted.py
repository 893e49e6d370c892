"""Shifted (error) dynamics of the controller and its dissipation matrix."""

import logging
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple, Union

import numpy as np

from ..common.errors import DimensionError, PreconditionError, UnsupportedError
from ..common.linalg import as_matrix, symmetrize
from ..common.status import Verdict
from ..controller.gains import ControllerParams
from ..program.cost import QuadraticCost
from ..program.program import SteadyStateProgram
from .gamma import GammaDiag

logger = logging.getLogger(__name__)

HESSIAN_TOL = 1e-9

GammaLike = Union[GammaDiag, np.ndarray]


def _as_gamma(gamma: GammaLike, n_ineq: int) -> GammaDiag:
    if not isinstance(gamma, GammaDiag):
        gamma = GammaDiag.from_weights(gamma)
    if gamma.size != n_ineq:
        raise DimensionError(f"gamma has {gamma.size} entries, program has {n_ineq} inequalities")
    return gamma


def shifted_matrix(
    params: ControllerParams,
    program: SteadyStateProgram,
    H: np.ndarray,
    gamma: GammaLike,
) -> np.ndarray:
    """``F`` with ``f(theta) - f(theta_bar) = F (theta - theta_bar)``.

    ``F = [[-H - rho R' G2 R, -R' G1], [eta G1 R, (eta/rho)(G1 - I)]]`` where
    ``G1 = blkdiag(I, Gamma)`` and ``G2 = blkdiag(0, Gamma)``.
    """
    n_xi, n_c = program.n_xi, program.n_c
    H = as_matrix(H, rows=n_xi, cols=n_xi, name="H")
    gamma = _as_gamma(gamma, program.n_ineq)
    R = program.R
    G1 = gamma.gamma1(program.n_eq)
    G2 = gamma.gamma2(program.n_eq)
    eta, rho = params.eta, params.rho
    return np.block([
        [-H - rho * R.T @ G2 @ R, -R.T @ G1],
        [eta * G1 @ R, (eta / rho) * (G1 - np.eye(n_c))],
    ])


def check_hessian_bounds(H: np.ndarray, mu: float, ell: float) -> Tuple[float, float]:
    """Extreme eigenvalues of ``H``; raises when outside ``[mu, ell]``."""
    eig = np.linalg.eigvalsh(symmetrize(H))
    tol = HESSIAN_TOL * max(1.0, ell)
    if eig.size and (eig[0] < mu - tol or eig[-1] > ell + tol):
        raise PreconditionError(
            f"Hessian spectrum [{eig[0]:.6g}, {eig[-1]:.6g}] outside [mu, ell] = "
            f"[{mu:.6g}, {ell:.6g}]"
        )
    return float(eig[0]), float(eig[-1])


def q_matrix(
    params: ControllerParams,
    program: SteadyStateProgram,
    H: np.ndarray,
    gamma: GammaLike,
) -> Tuple[np.ndarray, float]:
    """``Q = -F'P2 - P2 F - tau2 P2`` for the unforced shifted dynamics.

    Raises:
        PreconditionError: ``H`` violates ``mu I <= H <= ell I``
    """
    H = as_matrix(H, rows=program.n_xi, cols=program.n_xi, name="H")
    check_hessian_bounds(H, params.mu, params.ell)
    F = shifted_matrix(params, program, H, gamma)
    P2 = params.P2
    Q = symmetrize(-F.T @ P2 - P2 @ F - params.tau2 * P2)
    return Q, float(np.linalg.eigvalsh(Q)[0])


def sample_hessians(
    rng: np.random.Generator, n: int, mu: float, ell: float
) -> Iterator[np.ndarray]:
    """Endless stream of symmetric matrices with spectrum in ``[mu, ell]``.

    Each draw is a convex combination of ``mu I``, ``ell I`` and a random
    orthogonal conjugate of a diagonal with entries in ``[mu, ell]``.
    """
    eye = np.eye(n)
    while True:
        basis, _ = np.linalg.qr(rng.standard_normal((n, n)))
        interp = basis @ np.diag(rng.uniform(mu, ell, size=n)) @ basis.T
        w = rng.dirichlet(np.ones(3))
        yield symmetrize(w[0] * mu * eye + w[1] * ell * eye + w[2] * interp)


def program_hessian(program: SteadyStateProgram) -> np.ndarray:
    """Exact mean-value Hessian; only defined for quadratic costs."""
    if not isinstance(program.cost, QuadraticCost):
        raise UnsupportedError("mean-value Hessian needs a quadratic cost; pass H explicitly")
    return program.cost.hessian(np.zeros(program.n_xi))


def _gamma_points(
    n_ineq: int, samples: int, rng: np.random.Generator, vertex_cap: int
) -> Iterator[np.ndarray]:
    if n_ineq == 0:
        yield np.zeros(0)
        return
    if n_ineq <= vertex_cap:
        for k in range(2 ** n_ineq):
            yield np.array([(k >> j) & 1 for j in range(n_ineq)], dtype=float)
    else:
        yield np.zeros(n_ineq)
        yield np.ones(n_ineq)
    for _ in range(samples):
        yield rng.uniform(0.0, 1.0, size=n_ineq)


@dataclass(frozen=True)
class QReport:
    min_eig: float
    worst_gamma: np.ndarray
    worst_H: np.ndarray
    evaluations: int
    verdict: Verdict


def q_certificate(
    params: ControllerParams,
    program: SteadyStateProgram,
    samples: int = 100,
    seed: int = 0,
    H: Optional[np.ndarray] = None,
    random_hessians: int = 0,
    vertex_cap: int = 10,
    tol: float = 1e-8,
) -> QReport:
    """Minimum eigenvalue of ``Q`` over Gamma vertices, random Gamma and Hessians.

    Args:
        params: Synthesized gains
        program: Program the gains belong to
        samples: Random Gamma draws from the unit cube
        seed: Generator seed
        H: Hessian to test; defaults to the quadratic cost's own
        random_hessians: Extra Hessians drawn from ``[mu, ell]`` per Gamma point
        vertex_cap: Enumerate all Gamma vertices up to this many inequality rows
        tol: Relative PSD tolerance (scaled by ``max(1, ||Q||)``)
    """
    rng = np.random.default_rng(seed)
    base = [program_hessian(program) if H is None else as_matrix(H, name="H")]
    hessians = sample_hessians(rng, program.n_xi, params.mu, params.ell)

    worst = (float("inf"), np.zeros(program.n_ineq), base[0])
    scale = 1.0
    count = 0
    for point in _gamma_points(program.n_ineq, samples, rng, vertex_cap):
        candidates = base + [next(hessians) for _ in range(random_hessians)]
        for H_k in candidates:
            Q, lam = q_matrix(params, program, H_k, point)
            scale = max(scale, float(np.max(np.abs(Q))))
            count += 1
            if lam < worst[0]:
                worst = (lam, point, H_k)

    verdict = Verdict.PASS if worst[0] >= -tol * scale else Verdict.FAIL
    if verdict is Verdict.FAIL:
        logger.warning(f"Q certificate failed: min eig {worst[0]:.3e} at gamma={worst[1]}")
    return QReport(
        min_eig=worst[0], worst_gamma=worst[1], worst_H=worst[2], evaluations=count,
        verdict=verdict,
    )
