"""Passive LTI subsystems and their power-preserving interconnection."""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..common.errors import DimensionError, PreconditionError, StructuralError
from ..common.linalg import as_matrix, as_vector, is_hurwitz, spectral_abscissa

logger = logging.getLogger(__name__)

SKEW_TOL = 1e-12

Pair = Tuple[int, int]


@dataclass(frozen=True)
class SubsystemDims:
    """Sizes of state, input, output, interconnection output and input."""

    n: int
    m: int
    p: int
    s: int
    q: int


@dataclass(frozen=True, eq=False)
class Subsystem:
    """One block ``x' = A x + B u + G w + d``, ``y = C x``, ``z = E x``.

    ``storage`` optionally carries a physical energy weight ``P`` (for instance
    the capacitance/inductance diagonal of a circuit) so monitors can use the
    natural storage ``x'Px/2`` instead of a synthesized one.
    """

    index: int
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    E: Optional[np.ndarray] = None
    G: Optional[np.ndarray] = None
    d: Optional[np.ndarray] = None
    storage: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        A = as_matrix(self.A, name=f"A[{self.index}]")
        n = A.shape[0]
        if A.shape != (n, n):
            raise DimensionError(f"A[{self.index}] must be square, got {A.shape}")
        B = as_matrix(self.B, rows=n, name=f"B[{self.index}]")
        C = as_matrix(self.C, cols=n, name=f"C[{self.index}]")
        E = as_matrix(self.E, cols=n, name=f"E[{self.index}]")
        G = as_matrix(self.G, rows=n, name=f"G[{self.index}]")
        d = as_vector(self.d, name=f"d[{self.index}]") if self.d is not None else np.zeros(n)
        if d.shape[0] != n:
            raise DimensionError(f"d[{self.index}] has length {d.shape[0]}, expected {n}")
        if B.shape[1] != C.shape[0]:
            raise DimensionError(
                f"subsystem {self.index}: input size m={B.shape[1]} differs from "
                f"output size p={C.shape[0]}; the passive port must be square"
            )
        if not is_hurwitz(A):
            raise PreconditionError(
                f"A[{self.index}] is not Hurwitz (max Re eig = {spectral_abscissa(A):.3e})",
                bound=spectral_abscissa(A),
            )
        storage = None
        if self.storage is not None:
            storage = as_matrix(self.storage, rows=n, cols=n, name=f"storage[{self.index}]")
        for name, value in (("A", A), ("B", B), ("C", C), ("E", E), ("G", G), ("d", d)):
            object.__setattr__(self, name, value)
        object.__setattr__(self, "storage", storage)

    @property
    def dims(self) -> SubsystemDims:
        return SubsystemDims(
            n=self.A.shape[0],
            m=self.B.shape[1],
            p=self.C.shape[0],
            s=self.E.shape[0],
            q=self.G.shape[1],
        )

    def replace(self, **matrices: object) -> "Subsystem":
        """Copy with some matrices swapped (used for matrix-change faults)."""
        unknown = set(matrices) - {"A", "B", "C", "E", "G", "d", "storage"}
        if unknown:
            raise StructuralError(
                f"unknown subsystem field(s) {sorted(unknown)}", offender=self.index
            )
        current = {
            "A": self.A, "B": self.B, "C": self.C, "E": self.E,
            "G": self.G, "d": self.d, "storage": self.storage,
        }
        current.update(matrices)
        return Subsystem(index=self.index, **current)  # type: ignore[arg-type]


@dataclass(frozen=True, eq=False)
class InterconnectionMap:
    """Sparse coupling ``w_i = sum_j Omega[i, j] z_j``; zero blocks are omitted."""

    blocks: Dict[Pair, np.ndarray]
    n_subsystems: int

    @classmethod
    def from_blocks(cls, blocks: Mapping[Pair, object], n_subsystems: int) -> "InterconnectionMap":
        clean: Dict[Pair, np.ndarray] = {}
        for (i, j), value in blocks.items():
            mat = as_matrix(value, name=f"Omega[{i},{j}]")
            if mat.size and np.any(mat != 0.0):
                clean[(int(i), int(j))] = mat
        return cls(blocks=clean, n_subsystems=n_subsystems)

    @classmethod
    def empty(cls, n_subsystems: int) -> "InterconnectionMap":
        return cls(blocks={}, n_subsystems=n_subsystems)

    def pairs(self) -> List[Pair]:
        """Unordered coupled pairs ``(i, j)`` with ``i <= j`` in sorted order."""
        return sorted({(min(i, j), max(i, j)) for i, j in self.blocks})

    def block(self, i: int, j: int, shape: Tuple[int, int]) -> np.ndarray:
        return self.blocks.get((i, j), np.zeros(shape))


@dataclass(frozen=True)
class PairViolation:
    pair: Pair
    magnitude: float


@dataclass(frozen=True)
class ValidationReport:
    """Result of the skew-pair check; an empty violation list means pass."""

    violations: Tuple[PairViolation, ...] = field(default_factory=tuple)
    checked_pairs: int = 0

    @property
    def passed(self) -> bool:
        return not self.violations

    def describe(self) -> str:
        if self.passed:
            return f"power-preserving ({self.checked_pairs} coupled pairs)"
        parts = [f"{v.pair}: {v.magnitude:.3e}" for v in self.violations]
        return "skew violations " + ", ".join(parts)


def _dims_by_index(subsystems: Iterable[Subsystem]) -> Dict[int, SubsystemDims]:
    return {sub.index: sub.dims for sub in subsystems}


def _check_block_shapes(imap: InterconnectionMap, dims: Dict[int, SubsystemDims]) -> None:
    for (i, j), mat in imap.blocks.items():
        if i not in dims or j not in dims:
            missing = i if i not in dims else j
            raise StructuralError(
                f"block ({i},{j}) references missing subsystem {missing}", offender=(i, j)
            )
        expected = (dims[i].q, dims[j].s)
        if mat.shape != expected:
            raise StructuralError(
                f"block ({i},{j}) has shape {mat.shape}, expected {expected} (q_{i} x s_{j})",
                offender=(i, j),
            )


def validate_interconnection(
    imap: InterconnectionMap,
    subsystems: Optional[Sequence[Subsystem]] = None,
    tol: float = SKEW_TOL,
) -> ValidationReport:
    """Check ``Omega[i, j] + Omega[j, i]^T = 0`` for every coupled pair.

    Args:
        imap: Interconnection blocks
        subsystems: When given, block shapes are checked against ``(q_i, s_j)``
        tol: Entrywise tolerance

    Returns:
        Report listing each violating pair once, keyed ``(min, max)``

    Raises:
        StructuralError: A block's shape disagrees with the subsystems it couples
    """
    if subsystems is not None:
        _check_block_shapes(imap, _dims_by_index(subsystems))

    violations: List[PairViolation] = []
    pairs = imap.pairs()
    for i, j in pairs:
        forward = imap.blocks.get((i, j))
        backward = imap.blocks.get((j, i))
        if forward is None:
            assert backward is not None
            forward = np.zeros(backward.T.shape)
        if backward is None:
            backward = np.zeros(forward.T.shape)
        if forward.shape != backward.T.shape:
            raise StructuralError(
                f"blocks ({i},{j}) {forward.shape} and ({j},{i}) {backward.shape} "
                f"cannot form a skew pair",
                offender=(i, j),
            )
        magnitude = float(np.max(np.abs(forward + backward.T))) if forward.size else 0.0
        if magnitude > tol:
            violations.append(PairViolation(pair=(i, j), magnitude=magnitude))

    report = ValidationReport(violations=tuple(violations), checked_pairs=len(pairs))
    logger.debug(f"Interconnection check: {report.describe()}")
    return report
