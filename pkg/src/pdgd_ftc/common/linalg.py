"""Dense linear-algebra helpers shared by all modules."""

from typing import Optional, Sequence

import numpy as np
from scipy import linalg

from .errors import DimensionError

HURWITZ_TOL = 1e-9
PSD_TOL = 1e-8


def as_matrix(value: object, rows: Optional[int] = None, cols: Optional[int] = None,
              name: str = "matrix") -> np.ndarray:
    """Coerce nested sequences to a 2-D float array and check its shape.

    Empty inputs become ``rows x cols`` zero-size arrays so that blocks with a
    zero dimension can be stacked like any other.
    """
    arr = np.asarray(value if value is not None else [], dtype=float)
    if arr.size == 0:
        return np.zeros((rows or 0, cols or 0))
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1) if rows in (None, 1) else arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be two-dimensional, got {arr.ndim} dims")
    if rows is not None and arr.shape[0] != rows:
        raise DimensionError(f"{name} has {arr.shape[0]} rows, expected {rows}")
    if cols is not None and arr.shape[1] != cols:
        raise DimensionError(f"{name} has {arr.shape[1]} columns, expected {cols}")
    return arr


def as_vector(value: object, size: Optional[int] = None, name: str = "vector") -> np.ndarray:
    """Coerce to a 1-D float array, optionally checking its length."""
    arr = np.asarray(value if value is not None else [], dtype=float).reshape(-1)
    if size is not None and arr.shape[0] != size:
        raise DimensionError(f"{name} has length {arr.shape[0]}, expected {size}")
    return arr


def block_diag(blocks: Sequence[np.ndarray]) -> np.ndarray:
    """Block-diagonal stack that keeps zero-size blocks in the shape count."""
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = np.zeros((rows, cols))
    r = c = 0
    for b in blocks:
        out[r:r + b.shape[0], c:c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


def symmetrize(mat: np.ndarray) -> np.ndarray:
    return 0.5 * (mat + mat.T)


def spectral_abscissa(mat: np.ndarray) -> float:
    """Largest real part of the spectrum (``-inf`` for an empty matrix)."""
    if mat.size == 0:
        return float("-inf")
    return float(np.max(np.linalg.eigvals(mat).real))


def is_hurwitz(mat: np.ndarray, tol: float = HURWITZ_TOL) -> bool:
    return spectral_abscissa(mat) < -tol


def min_sym_eig(mat: np.ndarray) -> float:
    if mat.size == 0:
        return float("inf")
    return float(linalg.eigvalsh(symmetrize(mat))[0])


def max_sym_eig(mat: np.ndarray) -> float:
    if mat.size == 0:
        return float("-inf")
    return float(linalg.eigvalsh(symmetrize(mat))[-1])


def psd_margin(mat: np.ndarray, floor: np.ndarray) -> float:
    """Smallest eigenvalue of ``mat - floor``; nonnegative means ``mat >= floor``."""
    return min_sym_eig(mat - floor)


def is_psd(mat: np.ndarray, tol: float = PSD_TOL) -> bool:
    return min_sym_eig(mat) >= -tol


def spectral_radius(mat: np.ndarray) -> float:
    if mat.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(mat))))
