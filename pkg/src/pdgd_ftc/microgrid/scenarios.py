"""Microgrid cases from topology dictionaries, including the two-cluster benchmark."""

import copy
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence

from ..closedloop.faults import FaultEvent
from ..common.errors import ScenarioError
from ..plant.compact import CompactPlant
from ..program.program import SteadyStateProgram
from .mapping import build_microgrid_plant
from .network import Bus, BusKind, ClusterModel, Line, Network
from .program import Limits, Targets, limit_fault, microgrid_program

logger = logging.getLogger(__name__)

# Two clusters: setting buses 1 and 4, tie-line 3 -> 6 owned by cluster 1.
# Per-unit-like parameters; only the limit values of the fault scenario are normative.
_FOLLOWING = {"c_f": 2.2e-2, "psi_load": 0.2, "delta_load": 20.0}

FIG1_TOPOLOGY: Dict[str, Any] = {
    "buses": [
        {"id": 1, "cluster": 1, "kind": "setting", "v_min": 370.0},
        {"id": 2, "cluster": 1, "kind": "following", **_FOLLOWING, "i_f_max": 150.0},
        {"id": 3, "cluster": 1, "kind": "following", **_FOLLOWING, "v_min": 370.0},
        {"id": 4, "cluster": 2, "kind": "setting", "v_min": 370.0},
        {"id": 5, "cluster": 2, "kind": "following", **_FOLLOWING, "i_f_max": 150.0},
        {"id": 6, "cluster": 2, "kind": "following", **_FOLLOWING},
    ],
    "lines": [
        {"id": 1, "from": 1, "to": 2, "r": 0.05, "l": 1.8e-3},
        {"id": 2, "from": 2, "to": 3, "r": 0.05, "l": 1.8e-3},
        {"id": 3, "from": 4, "to": 5, "r": 0.05, "l": 1.8e-3},
        {"id": 4, "from": 5, "to": 6, "r": 0.05, "l": 1.8e-3},
    ],
    "tie_lines": [
        {"id": 5, "from": 3, "to": 6, "r": 0.05, "l": 1.8e-3, "owner": 1},
    ],
    "targets": {
        "i_f": {"2": 100.0, "3": 60.0, "5": 90.0, "6": 60.0},
        "v_s": {"1": 380.0, "4": 380.0},
    },
    "include_vf_min": True,
}

FIG1_FAULTS: List[Dict[str, Any]] = [
    {"time": 5.0, "kind": "i_f_max", "bus": 2, "value": 40.0},
    {"time": 10.0, "kind": "i_f_max", "bus": 5, "value": 50.0},
]


@dataclass(eq=False)
class MicrogridCase:
    network: Network
    plant: CompactPlant
    models: List[ClusterModel]
    limits: Limits
    targets: Targets
    program: SteadyStateProgram
    faults: List[FaultEvent] = field(default_factory=list)


def _bus(entry: Dict[str, Any]) -> Bus:
    return Bus(
        id=int(entry["id"]),
        cluster=entry.get("cluster"),
        kind=BusKind(entry["kind"]),
        c_f=entry.get("c_f"),
        psi_load=float(entry.get("psi_load", 0.0)),
        delta_load=float(entry.get("delta_load", 0.0)),
        i_f_max=entry.get("i_f_max"),
        v_min=entry.get("v_min"),
    )


def _line(entry: Dict[str, Any]) -> Line:
    return Line(
        id=int(entry["id"]),
        from_bus=int(entry["from"]),
        to_bus=int(entry["to"]),
        r=float(entry["r"]),
        l=float(entry["l"]),
        owner=entry.get("owner"),
    )


def network_from_dict(payload: Dict[str, Any]) -> Network:
    """Network from ``buses``, ``lines`` and ``tie_lines`` arrays."""
    buses = [_bus(entry) for entry in payload["buses"]]
    lines = [_line(entry) for entry in payload.get("lines", [])]
    lines += [_line(entry) for entry in payload.get("tie_lines", [])]
    return Network(buses, lines)


def faults_from_dict(entries: Sequence[Dict[str, Any]]) -> List[FaultEvent]:
    """Microgrid fault list; each entry names a limit kind and a bus."""
    events = []
    for k, entry in enumerate(entries):
        try:
            events.append(limit_fault(float(entry["time"]), entry["kind"], int(entry["bus"]),
                                      float(entry["value"])))
        except KeyError as e:
            raise ScenarioError(f"fault {k} lacks {e}", [(f"/faults/{k}", f"missing {e}")]) from e
    return events


def build_microgrid(
    payload: Dict[str, Any], faults: Sequence[Dict[str, Any]] = ()
) -> MicrogridCase:
    """Network, plant, program and fault list of one microgrid description."""
    network = network_from_dict(payload)
    plant, models = build_microgrid_plant(network)
    limits = Limits.from_network(network, include_vf_min=bool(payload.get("include_vf_min", True)))
    raw = payload.get("targets", {})
    weights = payload.get("weights", {})
    targets = Targets(
        i_f={int(k): float(v) for k, v in raw.get("i_f", {}).items()},
        v_s={int(k): float(v) for k, v in raw.get("v_s", {}).items()},
        k_x=float(weights.get("k_x", 1.0)),
        k_u=float(weights.get("k_u", 1.0)),
        k_y=float(weights.get("k_y", 1.0)),
    )
    program = microgrid_program(plant, models, limits, targets)
    return MicrogridCase(
        network=network,
        plant=plant,
        models=models,
        limits=limits,
        targets=targets,
        program=program,
        faults=faults_from_dict(faults),
    )


def fig1_case(with_faults: bool = True) -> MicrogridCase:
    """Two-cluster, six-bus benchmark with the bus-2 and bus-5 limit faults."""
    return build_microgrid(copy.deepcopy(FIG1_TOPOLOGY), FIG1_FAULTS if with_faults else ())
