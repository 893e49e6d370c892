"""Lower bound on the controller metric."""

from typing import Optional

from ..common.linalg import min_sym_eig
from ..controller.gains import ControllerParams


def p2_floor(
    params: ControllerParams, epsilon: Optional[float] = None, eta: Optional[float] = None
) -> float:
    """``lambda_min(P2) - epsilon c min(eta, 1)``; nonnegative when ``c`` meets its bounds."""
    epsilon = params.epsilon if epsilon is None else epsilon
    eta = params.eta if eta is None else eta
    return min_sym_eig(params.P2) - epsilon * params.c * min(eta, 1.0)
