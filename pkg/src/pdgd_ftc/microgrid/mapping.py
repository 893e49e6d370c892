"""Clusters as passive subsystems and tie-lines as the skew interconnection.

Physical model of cluster ``a`` (``W = blkdiag(C_f, L)``)::

    C_f V_f' = -Y V_f - B_f I_a + I_f - I_load + B_ab w_i
    L   I_a' = B_f' V_f - R I_a + B_s' V_s + T' w_v

with ``w_i`` the negated currents of foreign-owned lines at our following
buses and ``w_v`` the signed foreign-end voltages of our owned tie-lines.
The subsystem is stored in standard form (divided by ``W``) with ``W`` kept
as its storage weight.
"""

import logging
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..common.errors import StructuralError
from ..plant.compact import CompactPlant, assemble_plant
from ..plant.subsystem import InterconnectionMap, Subsystem
from .network import ClusterModel, Network, build_cluster

logger = logging.getLogger(__name__)


def physical_blocks(model: ClusterModel) -> Dict[str, np.ndarray]:
    """``W``-weighted matrices ``A, B, G, d`` of one cluster."""
    n_f, n_l = len(model.following), len(model.lines)
    n_s, n_ab, n_t = len(model.setting), len(model.foreign_lines), len(model.tie_lines)

    A = np.zeros((n_f + n_l, n_f + n_l))
    A[:n_f, :n_f] = -model.Y_load
    A[:n_f, n_f:] = -model.B_f
    A[n_f:, :n_f] = model.B_f.T
    A[n_f:, n_f:] = -model.R

    B = np.zeros((n_f + n_l, n_f + n_s))
    B[:n_f, :n_f] = np.eye(n_f)
    B[n_f:, n_f:] = model.B_s.T

    G = np.zeros((n_f + n_l, n_ab + n_t))
    G[:n_f, :n_ab] = model.B_ab
    G[n_f:, n_ab:] = model.tie_selector().T

    d = np.concatenate([-model.I_load, np.zeros(n_l)])
    return {"A": A, "B": B, "G": G, "d": d}


def cluster_to_subsystem(model: ClusterModel, index: int) -> Subsystem:
    """Standard-form subsystem of one cluster.

    ``x = col(V_f, I_a)``, ``u = col(I_f, V_s)`` and the power-conjugate output
    ``y = col(V_f, B_s I_a)``, so ``W B = C'`` holds with the physical weight.

    The output is not the full state (``C != I``): a port of size ``n`` would
    break ``m = p`` whenever a cluster has more lines than setting buses. Limits
    on voltages and currents are therefore written on ``x`` and ``u`` rows of the
    program, never on ``y``.
    """
    phys = physical_blocks(model)
    W = model.storage
    w = np.diag(W)
    scale = 1.0 / w[:, None] if w.size else np.zeros((0, 1))
    return Subsystem(
        index=index,
        A=phys["A"] * scale,
        B=phys["B"] * scale,
        C=phys["B"].T,
        E=phys["G"].T,
        G=phys["G"] * scale,
        d=phys["d"] / w if w.size else phys["d"],
        storage=W,
    )


def tie_line_omega(models: Sequence[ClusterModel]) -> InterconnectionMap:
    """Boolean skew blocks ``[[0, -P^i_ab], [P^v_ab, 0]]`` for every cluster pair.

    Subsystem ``k`` is ``models[k - 1]``.

    Raises:
        StructuralError: A tie-line seen by one cluster has no partner
            coordinate in the other
    """
    by_cluster = {model.cluster: k + 1 for k, model in enumerate(models)}
    owner_of: Dict[int, int] = {}
    for model in models:
        for lid in model.tie_lines:
            owner_of[lid] = model.cluster

    blocks: Dict[Tuple[int, int], np.ndarray] = {}
    for a in models:
        n_ab, n_t = len(a.foreign_lines), len(a.tie_lines)
        for lid in a.foreign_lines:
            if lid not in owner_of:
                raise StructuralError(
                    f"line {lid} reaches cluster {a.cluster} but no cluster lists it as tie-line",
                    offender=lid,
                )
        for b in models:
            if b is a:
                continue
            P_i = np.zeros((n_ab, len(b.tie_lines)))
            for r, lid in enumerate(a.foreign_lines):
                if owner_of[lid] == b.cluster:
                    P_i[r, b.tie_lines.index(lid)] = 1.0
            P_v = np.zeros((n_t, len(b.foreign_lines)))
            for r, lid in enumerate(a.tie_lines):
                if lid in b.foreign_lines:
                    P_v[r, b.foreign_lines.index(lid)] = 1.0
            if not (P_i.any() or P_v.any()):
                continue
            omega = np.zeros((n_ab + n_t, len(b.foreign_lines) + len(b.tie_lines)))
            omega[:n_ab, len(b.foreign_lines):] = -P_i
            omega[n_ab:, :len(b.foreign_lines)] = P_v
            blocks[(by_cluster[a.cluster], by_cluster[b.cluster])] = omega

    for a in models:
        for lid in a.tie_lines:
            if not any(lid in b.foreign_lines for b in models if b is not a):
                raise StructuralError(
                    f"tie-line {lid} of cluster {a.cluster} has no foreign following end",
                    offender=lid,
                )
    logger.debug(f"Tie-line interconnection with {len(blocks)} nonzero blocks")
    return InterconnectionMap.from_blocks(blocks, n_subsystems=len(models))


def cluster_models(network: Network) -> List[ClusterModel]:
    return [build_cluster(network, cid) for cid in network.cluster_ids()]


def build_microgrid_plant(network: Network) -> Tuple[CompactPlant, List[ClusterModel]]:
    """Assemble the compact plant, subsystem ``k`` being the ``k``-th cluster id."""
    models = cluster_models(network)
    subsystems = [cluster_to_subsystem(model, k + 1) for k, model in enumerate(models)]
    plant = assemble_plant(subsystems, tie_line_omega(models))
    logger.info(
        f"Microgrid plant: {len(models)} clusters, n={plant.dims.n}, m={plant.dims.m}, "
        f"{len(network.tie_lines())} tie-lines"
    )
    return plant, models
