"""Clustered DC network description and the per-cluster incidence split."""

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..common.errors import PreconditionError, StructuralError

logger = logging.getLogger(__name__)


class BusKind(str, Enum):
    SETTING = "setting"
    FOLLOWING = "following"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Bus:
    """A bus with its DGU.

    Following buses carry the filter capacitance ``c_f`` (F), the constant
    impedance load ``psi_load`` (S) and the constant current load
    ``delta_load`` (A). Limits are ``None`` when absent.
    """

    id: int
    cluster: Optional[int]
    kind: BusKind
    c_f: Optional[float] = None
    psi_load: float = 0.0
    delta_load: float = 0.0
    i_f_max: Optional[float] = None
    v_min: Optional[float] = None

    @property
    def following(self) -> bool:
        return self.kind is BusKind.FOLLOWING


@dataclass(frozen=True)
class Line:
    """Resistive-inductive line oriented ``from_bus -> to_bus``."""

    id: int
    from_bus: int
    to_bus: int
    r: float
    l: float
    owner: Optional[int] = None


class Network:
    """Buses and lines with resolved, rule-checked line ownership.

    Raises:
        StructuralError: Clusterless bus, unknown endpoint, setting-setting
            line or an ownership assignment that breaks the rules
        PreconditionError: Non-positive line or capacitor parameters
    """

    def __init__(self, buses: Sequence[Bus], lines: Sequence[Line]):
        self.buses: Dict[int, Bus] = {}
        for bus in buses:
            if bus.id in self.buses:
                raise StructuralError(f"duplicate bus {bus.id}", offender=bus.id)
            if bus.cluster is None:
                raise StructuralError(f"bus {bus.id} belongs to no cluster", offender=bus.id)
            if bus.following:
                if bus.c_f is None:
                    raise StructuralError(f"following bus {bus.id} lacks c_f", offender=bus.id)
                if bus.c_f <= 0.0 or bus.psi_load < 0.0:
                    raise PreconditionError(
                        f"bus {bus.id}: need c_f > 0 and psi_load >= 0 "
                        f"(got {bus.c_f}, {bus.psi_load})"
                    )
            self.buses[bus.id] = bus

        self.lines: Dict[int, Line] = {}
        for line in lines:
            if line.id in self.lines:
                raise StructuralError(f"duplicate line {line.id}", offender=line.id)
            self.lines[line.id] = self._resolve_owner(line)

    def _resolve_owner(self, line: Line) -> Line:
        for end in (line.from_bus, line.to_bus):
            if end not in self.buses:
                raise StructuralError(f"line {line.id} ends at unknown bus {end}",
                                      offender=line.id)
        if line.from_bus == line.to_bus:
            raise StructuralError(f"line {line.id} is a self-loop", offender=line.id)
        if line.r <= 0.0 or line.l <= 0.0:
            raise PreconditionError(f"line {line.id}: need r > 0 and l > 0")

        a, b = self.buses[line.from_bus], self.buses[line.to_bus]
        if not a.following and not b.following:
            raise StructuralError(f"line {line.id} joins two setting buses", offender=line.id)

        if a.cluster == b.cluster:
            allowed = {a.cluster}
        elif not a.following:
            allowed = {a.cluster}
        elif not b.following:
            allowed = {b.cluster}
        else:
            allowed = {a.cluster, b.cluster}
        owner = line.owner if line.owner is not None else sorted(allowed)[0]
        if line.owner is None and len(allowed) > 1:
            owner = a.cluster
        if owner not in allowed:
            raise StructuralError(
                f"line {line.id} may be owned by cluster(s) {sorted(allowed)}, not {owner}",
                offender=line.id,
            )
        return replace(line, owner=owner)

    def cluster_ids(self) -> List[int]:
        return sorted({bus.cluster for bus in self.buses.values()})  # type: ignore[type-var]

    def incidence(self) -> Tuple[np.ndarray, List[int], List[int]]:
        """Full bus-by-line incidence (+1 at ``from``, -1 at ``to``) with its index orders."""
        bus_ids = sorted(self.buses)
        line_ids = sorted(self.lines)
        row = {bid: k for k, bid in enumerate(bus_ids)}
        inc = np.zeros((len(bus_ids), len(line_ids)))
        for col, lid in enumerate(line_ids):
            line = self.lines[lid]
            inc[row[line.from_bus], col] = 1.0
            inc[row[line.to_bus], col] = -1.0
        return inc, bus_ids, line_ids

    def tie_lines(self) -> List[Line]:
        return [
            self.lines[lid] for lid in sorted(self.lines)
            if self.buses[self.lines[lid].from_bus].cluster
            != self.buses[self.lines[lid].to_bus].cluster
        ]


@dataclass(frozen=True, eq=False)
class ClusterModel:
    """Incidence blocks and parameter diagonals of one cluster.

    ``B_s``/``B_f`` are the setting/following rows over owned lines,
    ``B_ab`` the following rows over foreign-owned adjacent lines and
    ``B_fb`` the foreign following rows over owned tie-lines.
    """

    cluster: int
    setting: Tuple[int, ...]
    following: Tuple[int, ...]
    lines: Tuple[int, ...]
    foreign_lines: Tuple[int, ...]
    tie_lines: Tuple[int, ...]
    foreign_buses: Tuple[int, ...]
    B_s: np.ndarray
    B_f: np.ndarray
    B_ab: np.ndarray
    B_fb: np.ndarray
    C_f: np.ndarray
    Y_load: np.ndarray
    L: np.ndarray
    R: np.ndarray
    I_load: np.ndarray

    @property
    def n(self) -> int:
        return len(self.following) + len(self.lines)

    @property
    def m(self) -> int:
        return len(self.following) + len(self.setting)

    @property
    def storage(self) -> np.ndarray:
        """Energy weight ``blkdiag(C_f, L)``."""
        n_f, n_l = len(self.following), len(self.lines)
        out = np.zeros((n_f + n_l, n_f + n_l))
        out[:n_f, :n_f] = self.C_f
        out[n_f:, n_f:] = self.L
        return out

    def tie_selector(self) -> np.ndarray:
        """Boolean rows picking the owned tie-lines out of the owned lines."""
        sel = np.zeros((len(self.tie_lines), len(self.lines)))
        for t, lid in enumerate(self.tie_lines):
            sel[t, self.lines.index(lid)] = 1.0
        return sel


def build_cluster(network: Network, cluster_id: int) -> ClusterModel:
    """Split the network incidence for one cluster.

    Buses and lines are taken in ascending id order inside every block.

    Raises:
        StructuralError: Unknown cluster or a cluster without a setting bus
    """
    members = [bus for bus in network.buses.values() if bus.cluster == cluster_id]
    if not members:
        raise StructuralError(f"cluster {cluster_id} has no buses", offender=cluster_id)
    setting = tuple(sorted(b.id for b in members if not b.following))
    following = tuple(sorted(b.id for b in members if b.following))
    if not setting:
        raise StructuralError(f"cluster {cluster_id} has no voltage-setting bus",
                              offender=cluster_id)

    inc, bus_ids, line_ids = network.incidence()
    row = {bid: k for k, bid in enumerate(bus_ids)}
    col = {lid: k for k, lid in enumerate(line_ids)}
    in_cluster = set(setting) | set(following)

    owned = tuple(lid for lid in line_ids if network.lines[lid].owner == cluster_id)
    foreign = tuple(
        lid for lid in line_ids
        if network.lines[lid].owner != cluster_id
        and {network.lines[lid].from_bus, network.lines[lid].to_bus} & set(following)
    )
    ties = tuple(
        lid for lid in owned
        if not {network.lines[lid].from_bus, network.lines[lid].to_bus} <= in_cluster
    )
    foreign_buses = tuple(sorted({
        end for lid in ties
        for end in (network.lines[lid].from_bus, network.lines[lid].to_bus)
        if end not in in_cluster
    }))

    def block(bus_list: Sequence[int], line_list: Sequence[int]) -> np.ndarray:
        out = np.zeros((len(bus_list), len(line_list)))
        for i, bid in enumerate(bus_list):
            for j, lid in enumerate(line_list):
                out[i, j] = inc[row[bid], col[lid]]
        return out

    fol = [network.buses[bid] for bid in following]
    model = ClusterModel(
        cluster=cluster_id,
        setting=setting,
        following=following,
        lines=owned,
        foreign_lines=foreign,
        tie_lines=ties,
        foreign_buses=foreign_buses,
        B_s=block(setting, owned),
        B_f=block(following, owned),
        B_ab=block(following, foreign),
        B_fb=block(foreign_buses, owned),
        C_f=np.diag([b.c_f for b in fol]) if fol else np.zeros((0, 0)),
        Y_load=np.diag([b.psi_load for b in fol]) if fol else np.zeros((0, 0)),
        L=np.diag([network.lines[lid].l for lid in owned]) if owned else np.zeros((0, 0)),
        R=np.diag([network.lines[lid].r for lid in owned]) if owned else np.zeros((0, 0)),
        I_load=np.array([b.delta_load for b in fol], dtype=float),
    )
    logger.debug(
        f"Cluster {cluster_id}: {len(setting)} setting, {len(following)} following, "
        f"{len(owned)} owned lines ({len(ties)} tie), {len(foreign)} foreign"
    )
    return model
