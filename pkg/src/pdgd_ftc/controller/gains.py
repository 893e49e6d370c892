"""Closed-form synthesis of the controller metric and port matrices."""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy import linalg

from ..common.errors import PreconditionError
from ..common.linalg import min_sym_eig
from ..program.program import Layout, SteadyStateProgram, spectral_bounds

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GainBounds:
    c1: float
    c2: float
    c3: float

    @property
    def required(self) -> float:
        return max(self.c1, self.c2, self.c3)

    def violated_by(self, c: float) -> Tuple[str, ...]:
        return tuple(
            name for name, bound in (("c1", self.c1), ("c2", self.c2), ("c3", self.c3))
            if c < bound
        )


def gain_bounds(
    eta: float,
    rho: float,
    epsilon: float,
    kappa1: float,
    kappa2: float,
    mu: float,
    ell: float,
) -> GainBounds:
    """The three lower bounds on the metric scalar ``c``.

    Raises:
        PreconditionError: Non-positive gains or ``epsilon`` outside (0, 1)
    """
    if eta <= 0.0 or rho <= 0.0:
        raise PreconditionError(f"eta and rho must be positive, got eta={eta}, rho={rho}")
    if not 0.0 < epsilon < 1.0:
        raise PreconditionError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0.0 < kappa1 <= kappa2:
        raise PreconditionError(f"need 0 < kappa1 <= kappa2, got {kappa1}, {kappa2}")

    if eta >= 1.0:
        c1 = eta * math.sqrt(kappa2 / ((eta - epsilon) * (1.0 - epsilon)))
    else:
        c1 = math.sqrt(eta * kappa2 / ((1.0 - epsilon) * (1.0 - eta * epsilon)))
    c2 = kappa2 * rho
    q_rho = max(rho * kappa2 / mu, ell / mu)
    q_eta = max(eta / (ell * rho), ell / mu)
    c3 = 20.0 * ell * q_rho ** 2 * q_eta ** 2 * (kappa2 / kappa1)
    return GainBounds(c1=c1, c2=c2, c3=c3)


@dataclass(frozen=True, eq=False)
class ControllerParams:
    """Synthesized gains, metric ``P2`` and the port matrices of the controller."""

    eta: float
    rho: float
    epsilon: float
    c: float
    bounds: GainBounds
    P2: np.ndarray
    Mu: np.ndarray
    My: np.ndarray
    Bpd: np.ndarray
    tau2: float
    kappa1: float
    kappa2: float
    mu: float
    ell: float
    layout: Layout
    n_eq: int
    n_ineq: int

    @property
    def c1(self) -> float:
        return self.bounds.c1

    @property
    def c2(self) -> float:
        return self.bounds.c2

    @property
    def c3(self) -> float:
        return self.bounds.c3

    @property
    def n_theta(self) -> int:
        return self.layout.size + self.n_eq + self.n_ineq

    @property
    def lambda_min_P2(self) -> float:
        return min_sym_eig(self.P2)

    @property
    def cond_P2(self) -> float:
        return float(np.linalg.cond(self.P2))

    def report(self) -> Dict[str, Any]:
        """Gains dump for the CLI report."""
        return {
            "eta": self.eta,
            "rho": self.rho,
            "epsilon": self.epsilon,
            "c1": self.c1,
            "c2": self.c2,
            "c3": self.c3,
            "c": self.c,
            "tau2": self.tau2,
            "kappa1": self.kappa1,
            "kappa2": self.kappa2,
            "mu": self.mu,
            "ell": self.ell,
            "lambda_min_P2": self.lambda_min_P2,
            "cond_P2": self.cond_P2,
        }


def program_kappas(program: SteadyStateProgram) -> Tuple[float, float]:
    """Spectral bounds, with ``(1, 1)`` for a program without constraint rows."""
    if program.n_c == 0:
        return 1.0, 1.0
    return spectral_bounds(program)


def metric_matrix(R: np.ndarray, n_xi: int, eta: float, c: float) -> np.ndarray:
    """``P2 = [[eta c I, eta R'], [eta R, c I]]``."""
    n_c = R.shape[0]
    return np.block([
        [eta * c * np.eye(n_xi), eta * R.T],
        [eta * R, c * np.eye(n_c)],
    ])


def port_selectors(layout: Layout, n_c: int) -> Tuple[np.ndarray, np.ndarray]:
    """``Mu`` picks the u-estimate, ``My`` the y-estimate out of theta."""
    n_theta = layout.size + n_c
    Mu = np.zeros((layout.m, n_theta))
    Mu[:, layout.u] = np.eye(layout.m)
    My = np.zeros((layout.p, n_theta))
    My[:, layout.y] = np.eye(layout.p)
    return Mu, My


def _half_inverse_times(P2: np.ndarray, Mu: np.ndarray) -> np.ndarray:
    """``P2^{-1} Mu' / 2`` via Cholesky, falling back to a pseudo-inverse."""
    if Mu.shape[0] == 0:
        return np.zeros((P2.shape[0], 0))
    try:
        factor = linalg.cho_factor(P2)
        return 0.5 * linalg.cho_solve(factor, Mu.T)
    except linalg.LinAlgError:
        logger.warning("P2 is not positive definite; Bpd computed from a pseudo-inverse")
        return 0.5 * linalg.pinvh(P2) @ Mu.T


def synthesize_params(
    program: SteadyStateProgram,
    eta: float,
    rho: float,
    epsilon: float,
    c: Optional[float] = None,
) -> ControllerParams:
    """Build controller parameters for an arbitrary metric scalar ``c``.

    No check that ``c`` meets the lower bounds; certificates use this to probe
    undersized metrics. ``c`` defaults to the largest bound.
    """
    kappa1, kappa2 = program_kappas(program)
    bounds = gain_bounds(eta, rho, epsilon, kappa1, kappa2, program.cost.mu, program.cost.ell)
    if c is None:
        c = bounds.required
    P2 = metric_matrix(program.R, program.n_xi, eta, c)
    Mu, My = port_selectors(program.layout, program.n_c)
    Bpd = _half_inverse_times(P2, Mu)
    return ControllerParams(
        eta=float(eta),
        rho=float(rho),
        epsilon=float(epsilon),
        c=float(c),
        bounds=bounds,
        P2=P2,
        Mu=Mu,
        My=My,
        Bpd=Bpd,
        tau2=eta * kappa1 / (2.0 * c),
        kappa1=kappa1,
        kappa2=kappa2,
        mu=program.cost.mu,
        ell=program.cost.ell,
        layout=program.layout,
        n_eq=program.n_eq,
        n_ineq=program.n_ineq,
    )


def controller_gains(
    program: SteadyStateProgram,
    eta: float,
    rho: float = 1.0,
    epsilon: float = 0.5,
    override_c: Optional[float] = None,
) -> ControllerParams:
    """Synthesize ``c = max(c1, c2, c3)`` (or a larger override) and the port matrices.

    Raises:
        PreconditionError: Parameters out of range, or ``override_c`` below a bound
    """
    kappa1, kappa2 = program_kappas(program)
    bounds = gain_bounds(eta, rho, epsilon, kappa1, kappa2, program.cost.mu, program.cost.ell)
    c = bounds.required
    if override_c is not None:
        violated = bounds.violated_by(override_c)
        if violated:
            worst = max(getattr(bounds, name) for name in violated)
            raise PreconditionError(
                f"override_c={override_c} is below {', '.join(violated)} (needs >= {worst:.6g})",
                bound=worst,
            )
        c = float(override_c)

    params = synthesize_params(program, eta, rho, epsilon, c)
    logger.debug(
        f"Gains eta={eta}, rho={rho}, eps={epsilon}: c1={bounds.c1:.4g}, c2={bounds.c2:.4g}, "
        f"c3={bounds.c3:.4g}, c={c:.4g}, tau2={params.tau2:.4g}"
    )
    return params


def gains_report(params: ControllerParams) -> Dict[str, Any]:
    return params.report()
