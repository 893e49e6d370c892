"""Fixed-step closed-loop integration through a fault schedule."""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ..certificate.shifted import shifted_matrix
from ..common.errors import (
    DimensionError,
    DivergenceError,
    PreconditionError,
    StructuralError,
    TuningError,
)
from ..common.linalg import as_vector
from ..controller.dynamics import ControllerField, ControllerState
from ..controller.gains import ControllerParams, controller_gains
from ..plant.compact import CompactPlant
from ..plant.passivity import PassivityCertificate, certify_storage
from ..program.program import KKTPoint, SteadyStateProgram, kkt_residual
from .coupling import StabilityMargin, stability_margin
from .faults import FaultEvent, apply_fault, kappas_changed, validate_schedule

logger = logging.getLogger(__name__)

STIFFNESS_FACTOR = 0.1
KKT_COLUMNS = ("kkt_stationarity", "kkt_eq", "kkt_ineq", "kkt_comp")

Rhs = Callable[[float, np.ndarray], np.ndarray]


def rk4_step(rhs: Rhs, t: float, z: np.ndarray, h: float) -> np.ndarray:
    k1 = rhs(t, z)
    k2 = rhs(t + h / 2, z + 0.5 * h * k1)
    k3 = rhs(t + h / 2, z + 0.5 * h * k2)
    k4 = rhs(t + h, z + h * k3)
    return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step_count(length: float, dt: float) -> int:
    """Steps of size at most ``dt`` covering ``length``, robust to roundoff in ``length/dt``."""
    if length <= 0.0:
        return 0
    ratio = length / dt
    return max(1, int(math.ceil(ratio - 1e-9 * max(1.0, ratio))))


def integrate_fixed_step(
    rhs: Rhs, z0: np.ndarray, t0: float, t1: float, dt: float
) -> np.ndarray:
    """Classical RK4 from ``t0`` to ``t1`` with equal steps no larger than ``dt``."""
    n = step_count(t1 - t0, dt)
    z = np.array(z0, dtype=float)
    if n == 0:
        return z
    h = (t1 - t0) / n
    for k in range(n):
        z = rk4_step(rhs, t0 + k * h, z, h)
    return z


class ClosedLoop:
    """``col(x, theta)' = col(Ap x + B Mu theta + d, f(theta) - Bpd (C x - My theta))``."""

    def __init__(self, plant: CompactPlant, params: ControllerParams,
                 program: SteadyStateProgram):
        if params.layout.m != plant.dims.m or params.layout.p != plant.dims.p:
            raise DimensionError(
                f"controller ports (m={params.layout.m}, p={params.layout.p}) do not match "
                f"plant (m={plant.dims.m}, p={plant.dims.p})"
            )
        self.plant = plant
        self.params = params
        self.program = program
        self.field = ControllerField(params, program)
        self.n = plant.dims.n

    def ports(self, z: np.ndarray) -> Tuple[np.ndarray, ...]:
        x, theta = z[: self.n], z[self.n:]
        y = self.plant.C @ x
        u = self.params.Mu @ theta
        v_pd = -(y - self.params.My @ theta)
        return x, theta, u, y, v_pd

    def __call__(self, t: float, z: np.ndarray) -> np.ndarray:
        x, theta, u, _, v_pd = self.ports(z)
        x_dot = self.plant.Ap @ x + self.plant.B @ u + self.plant.d
        return np.concatenate([x_dot, self.field(theta, v_pd)])


def measured_kkt(
    program: SteadyStateProgram, params: ControllerParams, x: np.ndarray,
    y: np.ndarray, theta: np.ndarray,
) -> np.ndarray:
    """KKT residual of ``col(x, y, Mu theta)`` with the controller's multipliers."""
    state = ControllerState.from_vector(theta, program)
    xi = np.concatenate([x, y, params.Mu @ theta])
    report = kkt_residual(program, KKTPoint(xi=xi, nu_eq=state.nu_eq, nu_ineq=state.nu_ineq))
    return np.array([report.stationarity, report.primal_eq, report.primal_ineq,
                     report.complementarity])


def stiffness_bound(
    plant: CompactPlant, params: ControllerParams, program: SteadyStateProgram,
    theta: np.ndarray,
) -> float:
    """Largest eigenvalue modulus of ``Ap`` and of the controller Jacobian at ``theta``."""
    field_ = ControllerField(params, program)
    active = (field_.phi(theta) > 0.0).astype(float)
    xi = theta[: program.n_xi]
    H = program.cost.hessian(xi)
    if H is None:
        H = program.cost.ell * np.eye(program.n_xi)
    F = shifted_matrix(params, program, H, active)
    radius = 0.0
    for mat in (plant.Ap, F):
        if mat.size:
            radius = max(radius, float(np.max(np.abs(np.linalg.eigvals(mat)))))
    return radius


@dataclass(frozen=True, eq=False)
class AppliedEvent:
    """A fault as it hit the run: the state at the switch and the first later sample."""

    time: float
    event: FaultEvent
    state: np.ndarray
    sample_index: int


@dataclass(frozen=True, eq=False)
class Segment:
    """Fault-free stretch; samples ``first..last`` inclusive ran under these models.

    ``storage`` certifies the segment's plant and ``margin`` is the tuning
    condition of ``params`` against it.
    """

    start: float
    stop: float
    first: int
    last: int
    plant: CompactPlant
    program: SteadyStateProgram
    params: ControllerParams
    storage: Optional[PassivityCertificate] = None
    margin: Optional[StabilityMargin] = None


@dataclass(eq=False)
class Trace:
    times: np.ndarray
    x: np.ndarray
    theta: np.ndarray
    u: np.ndarray
    y: np.ndarray
    kkt: np.ndarray
    S: np.ndarray
    events: List[AppliedEvent] = field(default_factory=list)
    segments: List[Segment] = field(default_factory=list)
    dt: float = float("nan")
    n_steps: int = 0

    def __len__(self) -> int:
        return int(self.times.shape[0])

    @classmethod
    def empty(cls, n: int, n_theta: int, m: int, p: int) -> "Trace":
        return cls(
            times=np.zeros(0), x=np.zeros((0, n)), theta=np.zeros((0, n_theta)),
            u=np.zeros((0, m)), y=np.zeros((0, p)), kkt=np.zeros((0, len(KKT_COLUMNS))),
            S=np.zeros(0),
        )

    def columns(self) -> List[str]:
        names = ["t"]
        for label, arr in (("x", self.x), ("theta", self.theta), ("u", self.u), ("y", self.y)):
            names.extend(f"{label}[{i}]" for i in range(arr.shape[1]))
        return names + ["S", *KKT_COLUMNS]

    def to_frame(self) -> pd.DataFrame:
        data = np.hstack([
            self.times[:, None], self.x, self.theta, self.u, self.y, self.S[:, None], self.kkt,
        ]) if len(self) else np.zeros((0, len(self.columns())))
        return pd.DataFrame(data, columns=self.columns())

    @property
    def final_kkt(self) -> dict:
        if not len(self):
            return {}
        return dict(zip(KKT_COLUMNS, (float(v) for v in self.kkt[-1])))

    def segment_of(self, index: int) -> Segment:
        for segment in self.segments:
            if segment.first <= index <= segment.last:
                return segment
        raise IndexError(f"sample {index} lies in no segment")


def _resynthesize(params: ControllerParams, program: SteadyStateProgram) -> ControllerParams:
    new = controller_gains(program, params.eta, params.rho, params.epsilon)
    if params.c > new.c:
        # keep an enlarged metric if it still dominates the new bounds
        new = controller_gains(program, params.eta, params.rho, params.epsilon,
                               override_c=params.c)
    logger.info(f"Gains re-synthesized: c {params.c:.4g} -> {new.c:.4g}")
    return new


def simulate(
    plant: CompactPlant,
    params: ControllerParams,
    program: SteadyStateProgram,
    schedule: Sequence[FaultEvent],
    x0: np.ndarray,
    theta0: Union[ControllerState, np.ndarray, None],
    dt: Union[float, str],
    T: float,
    record_every: int = 1,
    check_stiffness: bool = True,
    storage: Optional[PassivityCertificate] = None,
    tau1_fraction: float = 0.5,
) -> Trace:
    """Integrate plant and controller with RK4 on an event-aligned grid.

    Each fault-free segment is split into equal steps no longer than ``dt``,
    so every event time is a grid point. Events at ``t = 0`` act before the
    first sample; any later event acts right after the sample that closes the
    preceding segment. The ``S`` column is left as NaN for the monitor.

    Args:
        plant: Compact plant in force at ``t = 0``
        params: Controller gains matching ``program``
        program: Steady-state program in force at ``t = 0``
        schedule: Fault events, strictly increasing in time
        x0: Initial plant state
        theta0: Initial controller state; zeros when ``None``
        dt: Maximum step, or ``"auto"`` for the stiffness limit
        T: Horizon in seconds
        record_every: Record every k-th step (plus ``t = 0``)
        check_stiffness: Reject ``dt`` above the stiffness limit
        storage: Storage certificate of ``plant``; certified here when ``None``
        tau1_fraction: Rate fraction for storages certified after a plant change

    Raises:
        PreconditionError: Bad ``dt``, ``T``, ``record_every`` or schedule
        DivergenceError: The state became non-finite
        TuningError: Gains in force after a fault violate the tuning condition
    """
    if T <= 0.0:
        raise PreconditionError(f"horizon T must be positive, got {T}", bound=0.0)
    if record_every < 1:
        raise PreconditionError(f"record_every must be >= 1, got {record_every}", bound=1.0)
    events = validate_schedule(schedule, T)

    x = as_vector(x0, plant.dims.n, name="x0")
    if theta0 is None:
        theta = np.zeros(params.n_theta)
    elif isinstance(theta0, ControllerState):
        theta = theta0.stacked()
    else:
        theta = as_vector(theta0, params.n_theta, name="theta0")

    limit = stiffness_bound(plant, params, program, theta)
    max_dt = STIFFNESS_FACTOR / limit if limit > 0.0 else T
    if dt == "auto":
        dt = min(max_dt, T)
    elif isinstance(dt, str):
        raise PreconditionError(f"dt must be a positive number or 'auto', got {dt!r}")
    dt = float(dt)
    if dt <= 0.0:
        raise PreconditionError(f"dt must be positive, got {dt}", bound=0.0)
    if check_stiffness and dt > max_dt * (1.0 + 1e-12):
        raise PreconditionError(
            f"dt={dt:.4g} exceeds the stiffness limit {max_dt:.4g} "
            f"(spectral radius {limit:.4g})",
            bound=max_dt,
        )

    times: List[float] = []
    rows_x: List[np.ndarray] = []
    rows_theta: List[np.ndarray] = []
    rows_u: List[np.ndarray] = []
    rows_y: List[np.ndarray] = []
    rows_kkt: List[np.ndarray] = []
    applied: List[AppliedEvent] = []
    segments: List[Segment] = []

    loop = ClosedLoop(plant, params, program)
    cert = storage if storage is not None else certify_storage(plant, tau1_fraction=tau1_fraction)
    margin = stability_margin(params, cert.tau1)

    def record(t: float, z: np.ndarray) -> None:
        x_k, theta_k, u_k, y_k, _ = loop.ports(z)
        times.append(t)
        rows_x.append(x_k.copy())
        rows_theta.append(theta_k.copy())
        rows_u.append(u_k)
        rows_y.append(y_k)
        rows_kkt.append(measured_kkt(loop.program, loop.params, x_k, y_k, theta_k))

    def switch(event: FaultEvent, z: np.ndarray) -> None:
        nonlocal loop, cert, margin
        new_plant, new_program = apply_fault(event, loop.plant, loop.program)
        new_params = loop.params
        if kappas_changed(loop.program, new_program):
            if new_program.n_xi + new_program.n_c != loop.params.n_theta:
                raise StructuralError(
                    f"fault {event.describe()} changes the controller state size",
                    offender=event.subsystem,
                )
            new_params = _resynthesize(loop.params, new_program)
        if new_plant is not loop.plant:
            cert = certify_storage(new_plant, tau1_fraction=tau1_fraction)
        margin = stability_margin(new_params, cert.tau1)
        if not margin.eta_condition_ok:
            raise TuningError(
                f"after fault {event.describe()} at t={event.time:g}: eta={margin.eta:.6g} "
                f"violates the tuning condition (kappa1={margin.kappa1:.4g}); "
                f"use eta > {margin.minimal_eta:.6g}",
                eta=margin.eta,
                minimal_eta=margin.minimal_eta,
                beta=margin.beta,
            )
        loop = ClosedLoop(new_plant, new_params, new_program)
        applied.append(AppliedEvent(time=event.time, event=event, state=z.copy(),
                                    sample_index=len(times)))

    z = np.concatenate([x, theta])
    boundaries = [0.0] + [e.time for e in events if 0.0 < e.time < T] + [T]
    pending = list(events)
    while pending and pending[0].time == 0.0:
        switch(pending.pop(0), z)
    record(0.0, z)

    step = 0
    segment_first = 0
    for seg_start, seg_stop in zip(boundaries[:-1], boundaries[1:]):
        n = step_count(seg_stop - seg_start, dt)
        h = (seg_stop - seg_start) / n if n else 0.0
        for k in range(n):
            t = seg_start + k * h
            z_next = rk4_step(loop, t, z, h)
            if not np.all(np.isfinite(z_next)):
                raise DivergenceError(
                    f"closed-loop state became non-finite after t={t:.6g}", last_finite_time=t
                )
            z = z_next
            step += 1
            if step % record_every == 0:
                t_end = seg_stop if k == n - 1 else seg_start + (k + 1) * h
                record(t_end, z)
        segments.append(Segment(
            start=seg_start, stop=seg_stop, first=segment_first, last=len(times) - 1,
            plant=loop.plant, program=loop.program, params=loop.params,
            storage=cert, margin=margin,
        ))
        segment_first = len(times)
        while pending and pending[0].time == seg_stop:
            switch(pending.pop(0), z)

    trace = Trace(
        times=np.asarray(times),
        x=np.vstack(rows_x),
        theta=np.vstack(rows_theta),
        u=np.vstack(rows_u),
        y=np.vstack(rows_y),
        kkt=np.vstack(rows_kkt),
        S=np.full(len(times), np.nan),
        events=applied,
        segments=segments,
        dt=dt,
        n_steps=step,
    )
    logger.info(
        f"Simulated T={T:g} s in {step} steps (dt<={dt:.4g}), {len(times)} samples, "
        f"{len(applied)} events"
    )
    return trace
