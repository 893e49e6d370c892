"""Vertex inequality over the switching pattern of the constraint rows."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from ..common.errors import PreconditionError
from ..common.linalg import as_matrix
from ..common.status import Verdict

logger = logging.getLogger(__name__)

VERTEX_CAP = 14
VERTEX_SAMPLES = 100_000
BATCH = 2048


@dataclass(frozen=True)
class VertexReport:
    worst_margin: float
    worst_vertex: Tuple[int, ...]
    checked: int
    exhaustive: bool
    verdict: Verdict

    def to_dict(self) -> dict:
        return {
            "worst_margin": self.worst_margin,
            "worst_vertex": list(self.worst_vertex),
            "checked": self.checked,
            "exhaustive": self.exhaustive,
            "verdict": str(self.verdict),
        }


def vertex_matrix(
    R: np.ndarray, vertex: np.ndarray, eta: float, rho: float, c: float
) -> np.ndarray:
    """Vertex matrix minus its floor; PSD means the inequality holds at ``b``.

    ``eta (D G + G D) + (2 eta c / rho)(I - D) - 1.5 eta G`` with ``G = R R'`` and
    ``D = diag(b)``.
    """
    G = R @ R.T
    D = np.diag(np.asarray(vertex, dtype=float))
    eye = np.eye(G.shape[0])
    return eta * (D @ G + G @ D) + (2.0 * eta * c / rho) * (eye - D) - 1.5 * eta * G


def _batch_margins(
    G: np.ndarray, vertices: np.ndarray, eta: float, rho: float, c: float
) -> np.ndarray:
    """Minimum eigenvalue of the vertex matrix for each row of ``vertices``."""
    n = G.shape[0]
    B = vertices[:, :, None]
    Bt = vertices[:, None, :]
    # D G + G D has entries (b_i + b_j) G_ij
    M = eta * (B + Bt) * G[None, :, :]
    diag = (2.0 * eta * c / rho) * (1.0 - vertices)
    M[:, np.arange(n), np.arange(n)] += diag
    M -= 1.5 * eta * G[None, :, :]
    return np.linalg.eigvalsh(M)[:, 0]


def _enumerate(n_c: int, start: int, stop: int) -> np.ndarray:
    k = np.arange(start, stop)[:, None]
    return ((k >> np.arange(n_c)[None, :]) & 1).astype(float)


def vertex_inequality(
    R: np.ndarray,
    eta: float,
    rho: float,
    c: float,
    cap: int = VERTEX_CAP,
    samples: int = VERTEX_SAMPLES,
    seed: int = 0,
    workers: int = 1,
    tol: float = 1e-8,
) -> VertexReport:
    """Check the vertex matrix is PSD on every ``b`` in ``{0, 1}^n_c``.

    Beyond ``cap`` rows, ``samples`` random vertices plus the all-zero and
    all-one ones are checked and the report is marked non-exhaustive. Ties in
    the minimum resolve to the lowest batch position, so parallel runs agree
    with serial ones.

    Raises:
        PreconditionError: Non-positive ``eta``, ``rho`` or ``c``
    """
    R = as_matrix(R, name="R")
    if eta <= 0.0 or rho <= 0.0 or c <= 0.0:
        raise PreconditionError(f"eta, rho and c must be positive (got {eta}, {rho}, {c})")
    n_c = R.shape[0]
    G = R @ R.T
    if n_c:
        kappa2 = float(np.linalg.eigvalsh(G)[-1])
        if c < kappa2 * rho:
            logger.warning(
                f"c={c:.6g} below kappa2*rho={kappa2 * rho:.6g}; vertex inequality may fail"
            )

    exhaustive = n_c <= cap
    batches: List[np.ndarray] = []
    if n_c == 0:
        batches.append(np.zeros((1, 0)))
    elif exhaustive:
        total = 2 ** n_c
        for start in range(0, total, BATCH):
            batches.append(_enumerate(n_c, start, min(start + BATCH, total)))
    else:
        rng = np.random.default_rng(seed)
        fixed = np.vstack([np.zeros(n_c), np.ones(n_c)])
        drawn = rng.integers(0, 2, size=(samples, n_c)).astype(float)
        pool = np.vstack([fixed, drawn])
        batches = [pool[i:i + BATCH] for i in range(0, pool.shape[0], BATCH)]

    def run(batch: np.ndarray) -> np.ndarray:
        if batch.shape[1] == 0:
            return np.full(batch.shape[0], np.inf)
        return _batch_margins(G, batch, eta, rho, c)

    if workers > 1 and len(batches) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            margins = list(executor.map(run, batches))
    else:
        margins = [run(batch) for batch in batches]

    flat = np.concatenate(margins)
    idx = int(np.argmin(flat))
    vertices = np.vstack(batches)
    worst = float(flat[idx])
    scale = max(1.0, 2.0 * eta * c / rho, float(np.max(np.abs(G))) if G.size else 0.0)

    if worst < -tol * scale:
        verdict = Verdict.FAIL
    else:
        verdict = Verdict.PASS if exhaustive else Verdict.NON_EXHAUSTIVE
    report = VertexReport(
        worst_margin=worst,
        worst_vertex=tuple(int(b) for b in vertices[idx]),
        checked=int(flat.shape[0]),
        exhaustive=exhaustive,
        verdict=verdict,
    )
    logger.debug(
        f"Vertex check n_c={n_c}: {report.checked} vertices, worst {worst:.3e} ({verdict})"
    )
    return report


def vertex_margin(
    R: np.ndarray, vertex: np.ndarray, eta: float, rho: float, c: float
) -> float:
    """Minimum eigenvalue of one vertex matrix."""
    return float(np.linalg.eigvalsh(vertex_matrix(as_matrix(R), vertex, eta, rho, c))[0])

