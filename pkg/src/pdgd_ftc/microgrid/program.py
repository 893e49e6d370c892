"""Steady-state program of a clustered microgrid and its fault adapter."""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..closedloop.faults import FaultEvent
from ..closedloop.faults import apply_fault as apply_plant_fault
from ..common.errors import PreconditionError, StructuralError
from ..plant.compact import CompactPlant, steady_state
from ..program.cost import QuadraticCost
from ..program.program import Layout, ProgramSource, SteadyStateProgram
from .mapping import physical_blocks
from .network import ClusterModel, Network

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Limits:
    """Injection ceilings and voltage floors per bus id.

    Non-finite values mean "no limit" and produce no row.
    """

    i_f_max: Dict[int, float] = field(default_factory=dict)
    v_min: Dict[int, float] = field(default_factory=dict)
    include_vf_min: bool = True

    @classmethod
    def from_network(cls, network: Network, include_vf_min: bool = True) -> "Limits":
        return cls(
            i_f_max={b.id: b.i_f_max for b in network.buses.values() if b.i_f_max is not None},
            v_min={b.id: b.v_min for b in network.buses.values() if b.v_min is not None},
            include_vf_min=include_vf_min,
        )


@dataclass(frozen=True)
class Targets:
    """Pre-fault set points: injections at following buses, voltages at setting buses."""

    i_f: Dict[int, float]
    v_s: Dict[int, float]
    k_x: float = 1.0
    k_u: float = 1.0
    k_y: float = 1.0


def input_order(models: Sequence[ClusterModel]) -> List[Tuple[str, int]]:
    """``(kind, bus)`` per entry of the stacked input, ``kind`` being ``i_f`` or ``v_s``."""
    order: List[Tuple[str, int]] = []
    for model in models:
        order.extend(("i_f", bus) for bus in model.following)
        order.extend(("v_s", bus) for bus in model.setting)
    return order


def state_order(models: Sequence[ClusterModel]) -> List[Tuple[str, int]]:
    """``(kind, id)`` per stacked state entry: ``v_f`` buses then ``i_line`` lines per cluster."""
    order: List[Tuple[str, int]] = []
    for model in models:
        order.extend(("v_f", bus) for bus in model.following)
        order.extend(("i_line", lid) for lid in model.lines)
    return order


def target_input(models: Sequence[ClusterModel], targets: Targets) -> np.ndarray:
    """Stacked ``u*``.

    Raises:
        PreconditionError: A bus has no target
    """
    values = []
    for kind, bus in input_order(models):
        table = targets.i_f if kind == "i_f" else targets.v_s
        if bus not in table:
            raise PreconditionError(f"missing {kind} target for bus {bus}")
        values.append(float(table[bus]))
    return np.array(values)


def _limit_rows(
    models: Sequence[ClusterModel], limits: Limits, layout: Layout
) -> Tuple[np.ndarray, np.ndarray, Tuple[str, ...]]:
    known = {bus for model in models for bus in model.following + model.setting}
    for table, name in ((limits.i_f_max, "i_f_max"), (limits.v_min, "v_min")):
        unknown = sorted(set(table) - known)
        if unknown:
            raise StructuralError(f"{name} given for unknown bus(es) {unknown}", offender=unknown)
    following = {bus for model in models for bus in model.following}
    stray = sorted(set(limits.i_f_max) - following)
    if stray:
        raise StructuralError(f"i_f_max given for setting bus(es) {stray}", offender=stray)

    rows: List[np.ndarray] = []
    h: List[float] = []
    labels: List[str] = []

    def add(col: int, sign: float, value: float, label: str) -> None:
        row = np.zeros(layout.size)
        row[col] = sign
        rows.append(row)
        h.append(sign * value)
        labels.append(label)

    for k, (kind, bus) in enumerate(input_order(models)):
        col = layout.u.start + k
        if kind == "i_f":
            value = limits.i_f_max.get(bus, math.inf)
            if math.isfinite(value):
                add(col, 1.0, value, f"i_f_max:{bus}")
        else:
            value = limits.v_min.get(bus, -math.inf)
            if math.isfinite(value):
                add(col, -1.0, value, f"v_min:{bus}")

    if limits.include_vf_min:
        for k, (kind, bus) in enumerate(state_order(models)):
            if kind != "v_f":
                continue
            value = limits.v_min.get(bus, -math.inf)
            if math.isfinite(value):
                add(layout.x.start + k, -1.0, value, f"v_min:{bus}")

    if not rows:
        return np.zeros((0, layout.size)), np.zeros(0), ()
    return np.vstack(rows), np.array(h), tuple(labels)


def microgrid_program(
    plant: CompactPlant,
    models: Sequence[ClusterModel],
    limits: Limits,
    targets: Targets,
) -> SteadyStateProgram:
    """Physical steady-state program over ``xi = col(x, y, u)``.

    Equality rows are the output map ``y = C x`` followed by the cluster
    KCL/KVL balances in ``W``-weighted form (``W Ap x + W B u = -W d``), so
    they read ``[-Y, -B_f, I, 0; B_f', -R, 0, B_s'] xi = (I_load, 0)`` per
    cluster with tie-line couplings filled in. The cost is
    ``||x - x*||^2_Kx + ||u - u*||^2_Ku`` lifted with the output term, where
    ``x*`` is the plant equilibrium under ``u*``.

    Raises:
        PreconditionError: Missing target
        StructuralError: Limit for an unknown bus
    """
    dims = plant.dims
    layout = Layout(n=dims.n, p=dims.p, m=dims.m)
    W = plant.storage_weight if plant.storage_weight is not None else np.eye(dims.n)

    u_star = target_input(models, targets)
    x_star = steady_state(plant, u_star)
    cost = QuadraticCost.from_reduced(
        Kx=2.0 * targets.k_x * np.eye(dims.n),
        Ku=2.0 * targets.k_u * np.eye(dims.m),
        x_target=x_star,
        u_target=u_star,
        C=plant.C,
        k_y=targets.k_y,
    )

    n, p, m = dims.n, dims.p, dims.m
    R_eq = np.vstack([
        np.hstack([-plant.C, np.eye(p), np.zeros((p, m))]),
        np.hstack([W @ plant.Ap, np.zeros((n, p)), W @ plant.B]),
    ])
    b = np.concatenate([np.zeros(p), -W @ plant.d])
    R_ineq, h, labels = _limit_rows(models, limits, layout)

    def rebuild(new_plant: CompactPlant) -> SteadyStateProgram:
        return microgrid_program(new_plant, models, limits, targets)

    program = SteadyStateProgram(
        R_eq=R_eq,
        b=b,
        R_ineq=R_ineq,
        h=h,
        cost=cost,
        layout=layout,
        ineq_labels=labels,
        source=ProgramSource(plant=plant, rebuild=rebuild),
    )
    logger.info(
        f"Microgrid program: n_xi={program.n_xi}, n_eq={program.n_eq}, "
        f"n_ineq={program.n_ineq} ({', '.join(labels) or 'no limits'})"
    )
    return program


def physical_residual(models: Sequence[ClusterModel], plant: CompactPlant,
                      x: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Unweighted ``A x + B u + G w + d`` per cluster, stacked, with ``w`` from the plant."""
    z = plant.E @ x
    w = plant.Omega @ z
    out = []
    xs, us = plant.state_slices(), plant.input_slices()
    w_off = 0
    for k, model in enumerate(models):
        phys = physical_blocks(model)
        q = phys["G"].shape[1]
        wk = w[w_off:w_off + q]
        w_off += q
        out.append(phys["A"] @ x[xs[k]] + phys["B"] @ u[us[k]] + phys["G"] @ wk + phys["d"])
    return np.concatenate(out) if out else np.zeros(0)


def limit_fault(time: float, kind: str, bus: int, value: float) -> FaultEvent:
    """Limit change on a labeled microgrid row (``kind`` is ``i_f_max`` or ``v_min``)."""
    if kind not in ("i_f_max", "v_min"):
        raise PreconditionError(f"unknown limit kind {kind!r}")
    row_value = value if kind == "i_f_max" else -value
    return FaultEvent.limit_change(time, f"{kind}:{bus}", row_value)


def apply_fault(program: SteadyStateProgram, event: FaultEvent) -> SteadyStateProgram:
    """Program in force after ``event``; limit changes keep the plant.

    Raises:
        StructuralError: Unknown row or subsystem, or a program without source
    """
    if program.source is None:
        raise StructuralError("microgrid program carries no source")
    _, updated = apply_plant_fault(event, program.source.plant, program)
    return updated


def oracle_injections(program: SteadyStateProgram, models: Sequence[ClusterModel],
                      xi: np.ndarray) -> Dict[int, float]:
    """Following-bus injections read off a ``xi`` vector, keyed by bus."""
    u = np.asarray(xi)[program.layout.u]
    return {bus: float(u[k]) for k, (kind, bus) in enumerate(input_order(models))
            if kind == "i_f"}


def bus_voltages(program: SteadyStateProgram, models: Sequence[ClusterModel],
                 xi: np.ndarray) -> Dict[int, float]:
    """Setting and following bus voltages read off a ``xi`` vector."""
    xi = np.asarray(xi)
    x, u = xi[program.layout.x], xi[program.layout.u]
    out: Dict[int, float] = {}
    for k, (kind, bus) in enumerate(state_order(models)):
        if kind == "v_f":
            out[bus] = float(x[k])
    for k, (kind, bus) in enumerate(input_order(models)):
        if kind == "v_s":
            out[bus] = float(u[k])
    return dict(sorted(out.items()))