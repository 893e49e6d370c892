"""Compact network model: stacked blocks and the coupled state matrix."""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..common.errors import DimensionError, StructuralError
from ..common.linalg import as_vector, block_diag, is_hurwitz
from .subsystem import InterconnectionMap, Subsystem, SubsystemDims, validate_interconnection

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PlantDims:
    n: int
    m: int
    p: int
    s: int
    q: int


@dataclass(frozen=True, eq=False)
class CompactPlant:
    """Stacked network ``x' = Ap x + B u + d``, ``y = C x`` with ``Ap = A + G Omega E``."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    E: np.ndarray
    G: np.ndarray
    Omega: np.ndarray
    Ap: np.ndarray
    d: np.ndarray
    dims: PlantDims
    subsystems: Tuple[Subsystem, ...]
    interconnection: InterconnectionMap
    storage_weight: Optional[np.ndarray] = None

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.Ap)

    @property
    def hurwitz(self) -> bool:
        return is_hurwitz(self.Ap)

    def state_slices(self) -> List[slice]:
        """Per-subsystem slices into the stacked state."""
        return _slices([sub.dims.n for sub in self.subsystems])

    def input_slices(self) -> List[slice]:
        return _slices([sub.dims.m for sub in self.subsystems])

    def output(self, x: np.ndarray) -> np.ndarray:
        return self.C @ x


def _slices(sizes: Sequence[int]) -> List[slice]:
    out = []
    start = 0
    for size in sizes:
        out.append(slice(start, start + size))
        start += size
    return out


def coupled_state_matrix(
    A: np.ndarray, G: np.ndarray, Omega: np.ndarray, E: np.ndarray
) -> np.ndarray:
    """``A + G Omega E``; single evaluation order so reassembly is bit-exact."""
    return A + G @ Omega @ E


def dense_omega(imap: InterconnectionMap, dims: Sequence[SubsystemDims]) -> np.ndarray:
    """Assemble the dense ``q x s`` interconnection matrix in index order."""
    q_offsets = np.concatenate([[0], np.cumsum([d.q for d in dims])]).astype(int)
    s_offsets = np.concatenate([[0], np.cumsum([d.s for d in dims])]).astype(int)
    omega = np.zeros((q_offsets[-1], s_offsets[-1]))
    for (i, j), block in imap.blocks.items():
        rows = slice(q_offsets[i - 1], q_offsets[i])
        cols = slice(s_offsets[j - 1], s_offsets[j])
        omega[rows, cols] = block
    return omega


def assemble_plant(subsystems: Sequence[Subsystem], imap: InterconnectionMap) -> CompactPlant:
    """Stack subsystems in index order and close the interconnection.

    Args:
        subsystems: Blocks with indices ``1..N`` (any order)
        imap: Power-preserving interconnection

    Returns:
        Compact plant; a non-Hurwitz ``Ap`` is logged, not rejected

    Raises:
        StructuralError: Non-contiguous indices, dangling blocks or skew violations
    """
    ordered = sorted(subsystems, key=lambda sub: sub.index)
    indices = [sub.index for sub in ordered]
    if indices != list(range(1, len(ordered) + 1)):
        raise StructuralError(f"subsystem indices must be 1..N, got {indices}", offender=indices)
    if imap.n_subsystems not in (0, len(ordered)):
        raise StructuralError(
            f"interconnection declares {imap.n_subsystems} subsystems, got {len(ordered)}"
        )

    report = validate_interconnection(imap, ordered)
    if not report.passed:
        raise StructuralError(f"interconnection is not power-preserving: {report.describe()}",
                              offender=[v.pair for v in report.violations])

    dims = [sub.dims for sub in ordered]
    A = block_diag([sub.A for sub in ordered])
    B = block_diag([sub.B for sub in ordered])
    C = block_diag([sub.C for sub in ordered])
    E = block_diag([sub.E for sub in ordered])
    G = block_diag([sub.G for sub in ordered])
    d = np.concatenate([sub.d for sub in ordered]) if ordered else np.zeros(0)
    Omega = dense_omega(imap, dims)
    Ap = coupled_state_matrix(A, G, Omega, E)

    storage = None
    if ordered and all(sub.storage is not None for sub in ordered):
        storage = block_diag([sub.storage for sub in ordered])  # type: ignore[misc]

    plant = CompactPlant(
        A=A,
        B=B,
        C=C,
        E=E,
        G=G,
        Omega=Omega,
        Ap=Ap,
        d=d,
        dims=PlantDims(
            n=A.shape[0], m=B.shape[1], p=C.shape[0], s=E.shape[0], q=G.shape[1]
        ),
        subsystems=tuple(ordered),
        interconnection=imap,
        storage_weight=storage,
    )
    if not plant.hurwitz:
        eig = plant.eigenvalues
        logger.warning(
            f"Coupled matrix Ap is not Hurwitz: max Re eig = {np.max(eig.real):.3e} "
            f"over {eig.size} eigenvalues"
        )
    else:
        logger.debug(f"Assembled plant n={plant.dims.n}, m={plant.dims.m}, N={len(ordered)}")
    return plant


def plant_rhs(plant: CompactPlant, x: np.ndarray, u: np.ndarray) -> np.ndarray:
    """State derivative ``Ap x + B u + d``."""
    x = as_vector(x)
    u = as_vector(u)
    if x.shape[0] != plant.dims.n:
        raise DimensionError(f"state has length {x.shape[0]}, expected {plant.dims.n}")
    if u.shape[0] != plant.dims.m:
        raise DimensionError(f"input has length {u.shape[0]}, expected {plant.dims.m}")
    return plant.Ap @ x + plant.B @ u + plant.d


def steady_state(plant: CompactPlant, u: np.ndarray) -> np.ndarray:
    """Equilibrium state for a constant input, ``x = -Ap^{-1} (B u + d)``."""
    return -np.linalg.solve(plant.Ap, plant.B @ as_vector(u, plant.dims.m) + plant.d)
