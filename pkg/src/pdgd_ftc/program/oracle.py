"""Brute-force active-set KKT solver used as an independent reference."""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..common.errors import InfeasibleError, UnsupportedError
from .cost import QuadraticCost
from .program import KKTPoint, SteadyStateProgram

logger = logging.getLogger(__name__)

MAX_ORACLE_INEQ = 20
FEAS_TOL = 1e-9


def _solve_active_set(
    program: SteadyStateProgram, active: Tuple[int, ...]
) -> Optional[KKTPoint]:
    """Solve the equality-constrained KKT system for one active set.

    Returns the point when it is primal feasible and dual nonnegative.
    """
    cost = program.cost
    assert isinstance(cost, QuadraticCost)
    K = cost.K
    rows = list(active)
    A = np.vstack([program.R_eq, program.R_ineq[rows]])
    rhs_c = np.concatenate([program.b, program.h[rows]])
    n, k = program.n_xi, A.shape[0]

    kkt = np.block([[K, A.T], [A, np.zeros((k, k))]])
    rhs = np.concatenate([K @ cost.target, rhs_c])
    try:
        sol = np.linalg.solve(kkt, rhs)
    except np.linalg.LinAlgError:
        return None

    xi = sol[:n]
    multipliers = sol[n:]
    nu_eq = multipliers[: program.n_eq]
    lam = multipliers[program.n_eq:]

    scale = 1.0 + np.abs(program.h)
    slack = program.R_ineq @ xi - program.h
    if np.any(slack > FEAS_TOL * scale):
        return None
    if lam.size and np.any(lam < -FEAS_TOL * (1.0 + np.max(np.abs(lam)))):
        return None

    nu_ineq = np.zeros(program.n_ineq)
    nu_ineq[rows] = np.maximum(lam, 0.0)
    return KKTPoint(xi=xi, nu_eq=nu_eq, nu_ineq=nu_ineq)


def _first_passing(
    program: SteadyStateProgram,
    candidates: Sequence[Tuple[int, ...]],
    workers: int,
) -> Optional[Tuple[Tuple[int, ...], KKTPoint]]:
    if workers > 1 and len(candidates) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results: List[Optional[KKTPoint]] = list(
                executor.map(lambda act: _solve_active_set(program, act), candidates)
            )
        for active, point in zip(candidates, results):
            if point is not None:
                return active, point
        return None
    for active in candidates:
        point = _solve_active_set(program, active)
        if point is not None:
            return active, point
    return None


def solve_oracle(program: SteadyStateProgram, workers: int = 1) -> KKTPoint:
    """Enumerate active sets by size, then lexicographically, and return the first KKT point.

    Smaller active sets win ties, so degenerate constraints (zero multiplier and
    zero slack) are reported inactive.

    Args:
        program: Program with a quadratic cost and at most 20 inequalities
        workers: Threads used to evaluate the sets of one size

    Raises:
        UnsupportedError: Cost is not quadratic or too many inequalities
        InfeasibleError: No active set yields a feasible, dual-feasible point
    """
    if not isinstance(program.cost, QuadraticCost):
        raise UnsupportedError(f"oracle needs a quadratic cost, got {program.cost.kind}")
    if program.n_ineq > MAX_ORACLE_INEQ:
        raise UnsupportedError(
            f"oracle enumerates 2^n_ineq active sets; n_ineq={program.n_ineq} "
            f"exceeds {MAX_ORACLE_INEQ}"
        )

    for size in range(program.n_ineq + 1):
        candidates = list(itertools.combinations(range(program.n_ineq), size))
        found = _first_passing(program, candidates, workers)
        if found is not None:
            active, point = found
            logger.debug(f"Oracle active set {list(active)} (size {size})")
            return point

    raise InfeasibleError(
        f"no active set among 2^{program.n_ineq} candidates admits a feasible KKT point"
    )
