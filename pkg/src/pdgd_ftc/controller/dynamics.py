"""Augmented primal-dual gradient dynamics with an input channel."""

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ..common.errors import DimensionError
from ..common.linalg import as_vector
from ..program.program import KKTPoint, SteadyStateProgram
from .gains import ControllerParams


@dataclass(frozen=True)
class ControllerState:
    """Controller state ``theta = col(xi, nu_eq, nu_ineq)``."""

    xi: np.ndarray
    nu_eq: np.ndarray
    nu_ineq: np.ndarray

    @property
    def size(self) -> int:
        return self.xi.shape[0] + self.nu_eq.shape[0] + self.nu_ineq.shape[0]

    def stacked(self) -> np.ndarray:
        return np.concatenate([self.xi, self.nu_eq, self.nu_ineq])

    @classmethod
    def from_vector(cls, theta: np.ndarray, program: SteadyStateProgram) -> "ControllerState":
        theta = as_vector(theta, program.n_xi + program.n_c, name="theta")
        n_xi, n_eq = program.n_xi, program.n_eq
        return cls(
            xi=theta[:n_xi].copy(),
            nu_eq=theta[n_xi:n_xi + n_eq].copy(),
            nu_ineq=theta[n_xi + n_eq:].copy(),
        )

    @classmethod
    def from_kkt(cls, point: KKTPoint) -> "ControllerState":
        return cls(xi=point.xi.copy(), nu_eq=point.nu_eq.copy(), nu_ineq=point.nu_ineq.copy())

    @classmethod
    def zeros(cls, program: SteadyStateProgram) -> "ControllerState":
        return cls(np.zeros(program.n_xi), np.zeros(program.n_eq), np.zeros(program.n_ineq))

    def to_kkt(self) -> KKTPoint:
        return KKTPoint(xi=self.xi, nu_eq=self.nu_eq, nu_ineq=self.nu_ineq)


ThetaLike = Union[ControllerState, np.ndarray]


class ControllerField:
    """Vector field ``theta -> f(theta) + Bpd v`` bound to one program and gain set.

    Holds references to the program matrices so the integrator can call it on
    raw stacked vectors without re-validating dimensions every stage.
    """

    def __init__(self, params: ControllerParams, program: SteadyStateProgram):
        if params.n_theta != program.n_xi + program.n_c:
            raise DimensionError(
                f"params sized for n_theta={params.n_theta}, "
                f"program has {program.n_xi + program.n_c}"
            )
        self.params = params
        self.program = program
        self._n_xi = program.n_xi
        self._n_eq = program.n_eq

    def phi(self, theta: np.ndarray) -> np.ndarray:
        """``nu_ineq + rho (R_ineq xi - h)``, the argument of the clipping max."""
        prog = self.program
        xi = theta[: self._n_xi]
        nu_ineq = theta[self._n_xi + self._n_eq:]
        return nu_ineq + self.params.rho * (prog.R_ineq @ xi - prog.h)

    def __call__(self, theta: np.ndarray, v_pd: Optional[np.ndarray] = None) -> np.ndarray:
        prog, eta, rho = self.program, self.params.eta, self.params.rho
        n_xi, n_eq = self._n_xi, self._n_eq
        xi = theta[:n_xi]
        nu_eq = theta[n_xi:n_xi + n_eq]
        nu_ineq = theta[n_xi + n_eq:]
        g = np.maximum(nu_ineq + rho * (prog.R_ineq @ xi - prog.h), 0.0)

        out = np.concatenate([
            -prog.cost.gradient(xi) - prog.R_eq.T @ nu_eq - prog.R_ineq.T @ g,
            eta * (prog.R_eq @ xi - prog.b),
            (eta / rho) * (g - nu_ineq),
        ])
        if v_pd is not None and v_pd.size:
            out = out + self.params.Bpd @ v_pd
        return out


def _stacked(theta: ThetaLike, program: SteadyStateProgram) -> np.ndarray:
    if isinstance(theta, ControllerState):
        theta = theta.stacked()
    return as_vector(theta, program.n_xi + program.n_c, name="theta")


def controller_rhs(
    params: ControllerParams,
    program: SteadyStateProgram,
    theta: ThetaLike,
    v_pd: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Time derivative of the controller state.

    Args:
        params: Synthesized gains (``eta``, ``rho``, ``Bpd``)
        program: Program whose gradient and constraints drive the flow
        theta: Controller state, structured or stacked
        v_pd: Auxiliary input of length ``m``; zero when omitted

    Returns:
        Stacked derivative ``col(xi_dot, nu_eq_dot, nu_ineq_dot)``
    """
    vec = _stacked(theta, program)
    if v_pd is not None:
        v_pd = as_vector(v_pd, params.layout.m, name="v_pd")
    return ControllerField(params, program)(vec, v_pd)
