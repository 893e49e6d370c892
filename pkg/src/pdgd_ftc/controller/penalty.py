"""Augmented-Lagrangian penalty and the clipped inequality multiplier."""

from typing import Tuple

import numpy as np

from ..common.errors import PreconditionError
from ..common.linalg import as_vector
from ..program.program import SteadyStateProgram


def penalty_h(a: float, b: float, rho: float) -> Tuple[float, float, float]:
    """Penalty ``H_rho(a, b)`` and its partials ``(dH/da, dH/db)``.

    ``ab + rho a^2 / 2`` when ``rho a + b >= 0``, else ``-b^2 / (2 rho)``.
    Value and both partials are continuous across the switching line.
    """
    if rho <= 0.0:
        raise PreconditionError(f"rho must be positive, got {rho}", bound=0.0)
    if rho * a + b >= 0.0:
        return a * b + 0.5 * rho * a * a, b + rho * a, a
    return -b * b / (2.0 * rho), 0.0, -b / rho


def clip_multiplier(
    program: SteadyStateProgram, xi: np.ndarray, nu_ineq: np.ndarray, rho: float
) -> np.ndarray:
    """``g = max(nu + rho (R_ineq xi - h), 0)`` componentwise (zero at zero)."""
    xi = as_vector(xi, program.n_xi, name="xi")
    nu_ineq = as_vector(nu_ineq, program.n_ineq, name="nu_ineq")
    return np.maximum(nu_ineq + rho * (program.R_ineq @ xi - program.h), 0.0)
