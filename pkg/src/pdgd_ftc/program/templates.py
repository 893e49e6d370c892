"""Per-subsystem steady-state constraint templates."""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..common.errors import DimensionError
from ..common.linalg import as_matrix, as_vector
from ..plant.subsystem import SubsystemDims

BLOCKS = ("x", "y", "u")


@dataclass(frozen=True, eq=False)
class ConstraintTemplate:
    """Equality rows ``R_eq,k v = b_k`` and inequality rows ``R_ineq,k v <= h_k``.

    ``k`` ranges over the state, output and input of one subsystem; any block may
    be empty. Inequality rows can carry labels used by limit-change faults.
    """

    subsystem: int
    R_eq_x: Optional[np.ndarray] = None
    b_x: Optional[np.ndarray] = None
    R_eq_y: Optional[np.ndarray] = None
    b_y: Optional[np.ndarray] = None
    R_eq_u: Optional[np.ndarray] = None
    b_u: Optional[np.ndarray] = None
    R_ineq_x: Optional[np.ndarray] = None
    h_x: Optional[np.ndarray] = None
    R_ineq_y: Optional[np.ndarray] = None
    h_y: Optional[np.ndarray] = None
    R_ineq_u: Optional[np.ndarray] = None
    h_u: Optional[np.ndarray] = None
    labels: Dict[str, List[str]] = field(default_factory=dict)

    def rows(self, kind: str, block: str, width: int) -> Tuple[np.ndarray, np.ndarray]:
        """Matrix and right-hand side for ``kind`` in {"eq", "ineq"} and a block."""
        mat_name = f"R_{kind}_{block}"
        vec_name = f"{'b' if kind == 'eq' else 'h'}_{block}"
        raw_mat = getattr(self, mat_name)
        raw_vec = getattr(self, vec_name)
        vec = as_vector(raw_vec, name=f"{vec_name}[{self.subsystem}]")
        mat = as_matrix(
            raw_mat, rows=vec.shape[0], cols=width, name=f"{mat_name}[{self.subsystem}]"
        )
        if mat.shape[0] != vec.shape[0]:
            raise DimensionError(
                f"{mat_name}[{self.subsystem}] has {mat.shape[0]} rows but "
                f"{vec_name} has {vec.shape[0]} entries"
            )
        return mat, vec

    def ineq_labels(self, block: str, count: int) -> List[str]:
        given = self.labels.get(block)
        if given is not None:
            if len(given) != count:
                raise DimensionError(
                    f"template {self.subsystem}: {len(given)} labels for {count} {block}-rows"
                )
            return list(given)
        return [f"{block}{self.subsystem}[{k}]" for k in range(count)]

    def check(self, dims: SubsystemDims) -> None:
        """Validate every block against the subsystem's dimensions."""
        widths = {"x": dims.n, "y": dims.p, "u": dims.m}
        for kind in ("eq", "ineq"):
            for block in BLOCKS:
                self.rows(kind, block, widths[block])

    @classmethod
    def box_u(cls, subsystem: int, upper: Dict[int, float], m: int) -> "ConstraintTemplate":
        """Upper bounds ``u[k] <= value`` on selected input components."""
        keys = sorted(upper)
        R = np.zeros((len(keys), m))
        for row, k in enumerate(keys):
            R[row, k] = 1.0
        return cls(
            subsystem=subsystem,
            R_ineq_u=R,
            h_u=np.array([upper[k] for k in keys], dtype=float),
        )
