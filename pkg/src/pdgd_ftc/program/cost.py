"""Strongly convex, smooth cost functions over xi = col(x, y, u)."""

from abc import ABC, abstractmethod
from typing import Any, Callable, Dict, Optional

import numpy as np

from ..common.errors import DimensionError, PreconditionError, UnsupportedError
from ..common.linalg import as_matrix, as_vector, block_diag, symmetrize


class CostFunction(ABC):
    """Cost ``J`` with strong-convexity constant ``mu`` and smoothness ``ell``."""

    kind: str = "abstract"

    def __init__(self, dim: int, mu: float, ell: float):
        if not 0.0 < mu <= ell:
            raise PreconditionError(f"cost constants must satisfy 0 < mu <= ell, got {mu}, {ell}")
        self.dim = dim
        self.mu = float(mu)
        self.ell = float(ell)

    @property
    def is_quadratic(self) -> bool:
        return False

    @abstractmethod
    def value(self, xi: np.ndarray) -> float:
        pass

    @abstractmethod
    def gradient(self, xi: np.ndarray) -> np.ndarray:
        pass

    def hessian(self, xi: np.ndarray) -> Optional[np.ndarray]:
        """Hessian sample at ``xi``; ``None`` when the cost cannot provide one."""
        return None

    def to_dict(self) -> Dict[str, Any]:
        raise UnsupportedError(f"{self.kind} cost is not serializable")


class QuadraticCost(CostFunction):
    """``J = (xi - target)' K (xi - target) / 2`` with symmetric positive-definite ``K``."""

    kind = "quadratic"

    def __init__(self, K: object, target: object):
        K = symmetrize(as_matrix(K, name="K"))
        n = K.shape[0]
        if K.shape != (n, n):
            raise DimensionError(f"K must be square, got {K.shape}")
        target = as_vector(target, n, name="target")
        eig = np.linalg.eigvalsh(K)
        if eig[0] <= 0.0:
            raise PreconditionError(f"K is not positive definite (min eig {eig[0]:.3e})")
        super().__init__(n, float(eig[0]), float(eig[-1]))
        self.K = K
        self.target = target

    @property
    def is_quadratic(self) -> bool:
        return True

    def value(self, xi: np.ndarray) -> float:
        e = as_vector(xi, self.dim) - self.target
        return 0.5 * float(e @ self.K @ e)

    def gradient(self, xi: np.ndarray) -> np.ndarray:
        return self.K @ (as_vector(xi, self.dim) - self.target)

    def hessian(self, xi: Optional[np.ndarray] = None) -> np.ndarray:
        return self.K

    @classmethod
    def weighted_norm(cls, K: object, target: object) -> "QuadraticCost":
        """``J = ||xi - target||^2_K`` (no one-half), i.e. Hessian ``2K``."""
        return cls(2.0 * as_matrix(K, name="K"), target)

    @classmethod
    def from_reduced(
        cls,
        Kx: object,
        Ku: object,
        x_target: object,
        u_target: object,
        C: object,
        k_y: float = 1.0,
    ) -> "QuadraticCost":
        """Lift a cost on ``col(x, u)`` to ``col(x, y, u)``.

        Adds ``k_y ||y - C x||^2 / 2``, which vanishes on the steady-state set
        (``y = C x`` is an equality row) and makes the lifted Hessian positive
        definite in the ``y`` block.

        Args:
            Kx: State weight (n x n)
            Ku: Input weight (m x m)
            x_target: State target
            u_target: Input target
            C: Output map (p x n)
            k_y: Weight of the output-consistency term
        """
        if k_y <= 0.0:
            raise PreconditionError(f"k_y must be positive, got {k_y}")
        Kx = as_matrix(Kx, name="Kx")
        n = Kx.shape[0]
        Ku = as_matrix(Ku, name="Ku")
        m = Ku.shape[0]
        C = as_matrix(C, cols=n, name="C")
        p = C.shape[0]
        x_target = as_vector(x_target, n, name="x_target")
        u_target = as_vector(u_target, m, name="u_target")

        K_xy = np.block([
            [Kx + k_y * C.T @ C, -k_y * C.T],
            [-k_y * C, k_y * np.eye(p)],
        ])
        K = block_diag([K_xy, Ku])
        target = np.concatenate([x_target, C @ x_target, u_target])
        return cls(K, target)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "K": self.K.tolist(), "target": self.target.tolist()}


class CallbackCost(CostFunction):
    """Opaque cost given by value/gradient callbacks and declared constants."""

    kind = "callback"

    def __init__(
        self,
        dim: int,
        value_fn: Callable[[np.ndarray], float],
        gradient_fn: Callable[[np.ndarray], np.ndarray],
        mu: float,
        ell: float,
        hessian_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    ):
        super().__init__(dim, mu, ell)
        self._value_fn = value_fn
        self._gradient_fn = gradient_fn
        self._hessian_fn = hessian_fn

    def value(self, xi: np.ndarray) -> float:
        return float(self._value_fn(as_vector(xi, self.dim)))

    def gradient(self, xi: np.ndarray) -> np.ndarray:
        return as_vector(self._gradient_fn(as_vector(xi, self.dim)), self.dim, name="gradient")

    def hessian(self, xi: np.ndarray) -> Optional[np.ndarray]:
        if self._hessian_fn is None:
            return None
        return as_matrix(self._hessian_fn(as_vector(xi, self.dim)), self.dim, self.dim)


def cost_from_dict(payload: Dict[str, Any]) -> CostFunction:
    kind = payload.get("kind")
    if kind == "quadratic":
        return QuadraticCost(payload["K"], payload["target"])
    raise UnsupportedError(f"cannot rebuild cost of kind {kind!r}")


def finite_difference_gradient(
    cost: CostFunction, xi: np.ndarray, step: float = 1e-6
) -> np.ndarray:
    """Central differences of ``cost.value``; used to probe callback gradients."""
    xi = as_vector(xi, cost.dim)
    grad = np.zeros(cost.dim)
    for k in range(cost.dim):
        e = np.zeros(cost.dim)
        e[k] = step
        grad[k] = (cost.value(xi + e) - cost.value(xi - e)) / (2.0 * step)
    return grad
