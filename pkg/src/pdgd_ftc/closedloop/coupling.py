"""Plant/controller interconnection and the closed-loop tuning condition."""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..common.errors import PreconditionError, TuningError
from ..common.linalg import as_vector, max_sym_eig
from ..controller.dynamics import ControllerState
from ..controller.gains import ControllerParams, port_selectors, program_kappas
from ..program.program import SteadyStateProgram

logger = logging.getLogger(__name__)


def coupling(
    params: ControllerParams, theta: np.ndarray, y: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """``u = Mu theta`` and ``v_pd = -(y - My theta)``."""
    if isinstance(theta, ControllerState):
        theta = theta.stacked()
    theta = as_vector(theta, params.n_theta, name="theta")
    y = as_vector(y, params.layout.p, name="y")
    u = params.Mu @ theta
    v_pd = -(y - params.My @ theta)
    return u, v_pd


def cross_coupling(Mu: np.ndarray, My: np.ndarray) -> float:
    """``beta = lambda_max(Mu'My + My'Mu)``; zero for an empty port."""
    if Mu.shape[0] == 0:
        return 0.0
    return max(max_sym_eig(Mu.T @ My + My.T @ Mu), 0.0)


def minimal_eta(beta: float, kappa1: float, epsilon: float) -> float:
    """Smallest ``eta`` with ``eta kappa1 epsilon min(eta, 1) = beta``.

    Any larger ``eta`` satisfies the strict tuning condition.
    """
    if beta <= 0.0:
        return 0.0
    ratio = beta / (kappa1 * epsilon)
    return ratio if ratio >= 1.0 else math.sqrt(ratio)


def auto_eta(beta: float, kappa1: float, epsilon: float, safety: float = 1.05) -> float:
    """Safety factor times the minimal ``eta``; 1 when any ``eta`` works."""
    if safety <= 1.0:
        raise PreconditionError(f"safety factor must exceed 1, got {safety}", bound=1.0)
    eta_min = minimal_eta(beta, kappa1, epsilon)
    return safety * eta_min if eta_min > 0.0 else 1.0


def tune_eta(program: SteadyStateProgram, epsilon: float, safety: float = 1.05) -> float:
    """Auto-tuned ``eta`` for a program, from its ``kappa1`` and port layout."""
    kappa1, _ = program_kappas(program)
    Mu, My = port_selectors(program.layout, program.n_c)
    eta = auto_eta(cross_coupling(Mu, My), kappa1, epsilon, safety)
    logger.debug(f"Auto-tuned eta={eta:.6g} (kappa1={kappa1:.4g}, eps={epsilon})")
    return eta


@dataclass(frozen=True)
class StabilityMargin:
    beta: float
    eta: float
    kappa1: float
    epsilon: float
    eta_condition_ok: bool
    minimal_eta: float
    tau1: float
    tau2: float
    tau2e: float
    tau: float

    def require(self) -> "StabilityMargin":
        """Return self, or raise when the tuning condition fails."""
        if not self.eta_condition_ok:
            raise TuningError(
                f"eta={self.eta:.6g} violates eta*kappa1*eps*min(eta,1) > beta={self.beta:.6g}; "
                f"use eta > {self.minimal_eta:.6g}",
                eta=self.eta,
                minimal_eta=self.minimal_eta,
                beta=self.beta,
            )
        return self

    def as_dict(self) -> Dict[str, Any]:
        return {
            "beta": self.beta,
            "eta": self.eta,
            "eta_condition_ok": self.eta_condition_ok,
            "minimal_eta": self.minimal_eta,
            "tau1": self.tau1,
            "tau2": self.tau2,
            "tau2e": self.tau2e,
            "tau": self.tau,
        }


def stability_margin(
    params: ControllerParams, tau1: float, kappa1: Optional[float] = None
) -> StabilityMargin:
    """Evaluate the tuning condition and the closed-loop decay bound.

    ``tau2e = tau2 - beta / (2 eps c min(eta, 1))`` and ``tau = min(tau1, tau2e) / 2``.
    A failing condition is reported, not raised; call ``require()`` to enforce it.
    """
    if tau1 <= 0.0:
        raise PreconditionError(f"tau1 must be positive, got {tau1}", bound=0.0)
    kappa1 = params.kappa1 if kappa1 is None else kappa1
    eta, eps = params.eta, params.epsilon
    beta = cross_coupling(params.Mu, params.My)
    scale = eps * params.c * min(eta, 1.0)
    tau2e = (2.0 * params.tau2 * scale - beta) / (2.0 * scale)
    ok = eta * kappa1 * eps * min(eta, 1.0) > beta
    margin = StabilityMargin(
        beta=beta,
        eta=eta,
        kappa1=kappa1,
        epsilon=eps,
        eta_condition_ok=ok,
        minimal_eta=minimal_eta(beta, kappa1, eps),
        tau1=float(tau1),
        tau2=params.tau2,
        tau2e=tau2e,
        tau=0.5 * min(tau1, tau2e),
    )
    if ok and tau2e <= 0.0:
        logger.warning(f"Tuning condition holds but tau2e={tau2e:.3e} is not positive")
    return margin
