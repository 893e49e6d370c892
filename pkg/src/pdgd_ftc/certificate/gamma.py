"""Switching weights of the clipped multiplier along a pair of states."""

from dataclasses import dataclass

import numpy as np

from ..common.errors import DimensionError
from ..common.linalg import as_vector


@dataclass(frozen=True)
class GammaDiag:
    """Per-row weights with ``max(phi, 0) - max(phi_bar, 0) = gamma (phi - phi_bar)``."""

    phi: np.ndarray
    phi_bar: np.ndarray
    gamma: np.ndarray

    @property
    def size(self) -> int:
        return self.gamma.shape[0]

    def gamma1(self, n_eq: int) -> np.ndarray:
        """``blkdiag(I_neq, Gamma)``."""
        return np.diag(np.concatenate([np.ones(n_eq), self.gamma]))

    def gamma2(self, n_eq: int) -> np.ndarray:
        """``blkdiag(0_neq, Gamma)``."""
        return np.diag(np.concatenate([np.zeros(n_eq), self.gamma]))

    @classmethod
    def from_weights(cls, gamma: np.ndarray) -> "GammaDiag":
        """Weights given directly, e.g. a sampled point of the unit cube."""
        gamma = as_vector(gamma, name="gamma")
        if np.any(gamma < 0.0) or np.any(gamma > 1.0):
            raise DimensionError("gamma entries must lie in [0, 1]")
        nan = np.full(gamma.shape, np.nan)
        return cls(phi=nan, phi_bar=nan, gamma=gamma)


def gamma_diag(phi: np.ndarray, phi_bar: np.ndarray) -> GammaDiag:
    """Four-branch weights.

    * both positive: 1
    * both nonpositive: 0
    * ``phi > 0 >= phi_bar``: ``phi / (phi - phi_bar)``
    * ``phi <= 0 < phi_bar``: ``-phi_bar / (phi - phi_bar)``
    """
    phi = as_vector(phi, name="phi")
    phi_bar = as_vector(phi_bar, phi.shape[0], name="phi_bar")

    pos, pos_bar = phi > 0.0, phi_bar > 0.0
    gamma = np.where(pos & pos_bar, 1.0, 0.0)
    diff = phi - phi_bar
    # mixed branches imply diff != 0
    safe = np.where(diff == 0.0, 1.0, diff)
    up = pos & ~pos_bar
    down = ~pos & pos_bar
    gamma = np.where(up, phi / safe, gamma)
    gamma = np.where(down, -phi_bar / safe, gamma)
    return GammaDiag(phi=phi, phi_bar=phi_bar, gamma=np.clip(gamma, 0.0, 1.0))
