"""Fault events and their effect on plant and program."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..common.errors import PreconditionError, StructuralError
from ..plant.compact import CompactPlant, assemble_plant
from ..program.program import SteadyStateProgram, assemble_program

logger = logging.getLogger(__name__)


class FaultKind(str, Enum):
    LIMIT_CHANGE = "limit_change"
    MATRIX_CHANGE = "matrix_change"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class FaultEvent:
    """Scheduled change of one limit or of one subsystem's matrices."""

    time: float
    kind: FaultKind
    row: Union[int, str, None] = None
    value: Optional[float] = None
    subsystem: Optional[int] = None
    matrices: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def limit_change(cls, time: float, row: Union[int, str], value: float) -> "FaultEvent":
        return cls(time=float(time), kind=FaultKind.LIMIT_CHANGE, row=row, value=float(value))

    @classmethod
    def matrix_change(cls, time: float, subsystem: int, **matrices: Any) -> "FaultEvent":
        if not matrices:
            raise PreconditionError("matrix_change needs at least one replacement matrix")
        return cls(time=float(time), kind=FaultKind.MATRIX_CHANGE, subsystem=int(subsystem),
                   matrices=dict(matrices))

    def describe(self) -> str:
        if self.kind is FaultKind.LIMIT_CHANGE:
            return f"t={self.time:g} limit {self.row} -> {self.value:g}"
        return f"t={self.time:g} subsystem {self.subsystem} replaces {sorted(self.matrices)}"


def validate_schedule(schedule: Sequence[FaultEvent], T: float) -> List[FaultEvent]:
    """Check times lie in ``[0, T]`` and increase strictly.

    Raises:
        PreconditionError: Event outside the horizon or out of order
    """
    events = list(schedule)
    for k, event in enumerate(events):
        if not 0.0 <= event.time <= T:
            raise PreconditionError(f"fault at t={event.time} outside [0, {T}]", bound=T)
        if k and event.time <= events[k - 1].time:
            raise PreconditionError(
                f"fault times must increase strictly: {events[k - 1].time} then {event.time}"
            )
    return events


def _rebuild(plant: CompactPlant, program: SteadyStateProgram) -> SteadyStateProgram:
    source = program.source
    if source is None:
        raise StructuralError("program carries no source; cannot re-stack after a matrix change")
    if source.rebuild is not None:
        rebuilt = source.rebuild(plant)
    else:
        rebuilt = assemble_program(plant, source.templates, program.cost)
    # limits changed by earlier events survive re-stacking
    if rebuilt.ineq_labels == program.ineq_labels:
        rebuilt = rebuilt.with_h(program.h)
    return rebuilt


def apply_fault(
    event: FaultEvent, plant: CompactPlant, program: SteadyStateProgram
) -> Tuple[CompactPlant, SteadyStateProgram]:
    """Return the plant and program in force after ``event``.

    A limit change keeps the plant and replaces one ``h`` entry; a matrix
    change replaces one subsystem, reassembles the plant and re-stacks the
    program.

    Raises:
        StructuralError: Unknown inequality row or subsystem
    """
    if event.kind is FaultKind.LIMIT_CHANGE:
        idx = program.row_index(event.row)  # type: ignore[arg-type]
        if program.h[idx] == event.value:
            logger.debug(f"No-op fault {event.describe()}")
            return plant, program
        logger.info(f"Fault {event.describe()} (was {program.h[idx]:g})")
        return plant, program.with_limit(idx, event.value)  # type: ignore[arg-type]

    target = event.subsystem
    if target not in {sub.index for sub in plant.subsystems}:
        raise StructuralError(f"unknown subsystem {target}", offender=target)
    subsystems = [
        sub.replace(**event.matrices) if sub.index == target else sub
        for sub in plant.subsystems
    ]
    new_plant = assemble_plant(subsystems, plant.interconnection)
    new_program = _rebuild(new_plant, program)
    logger.info(f"Fault {event.describe()}")
    return new_plant, new_program


def kappas_changed(before: SteadyStateProgram, after: SteadyStateProgram) -> bool:
    """Whether the constraint matrix, and hence the spectral bounds, moved."""
    if before.R_eq.shape != after.R_eq.shape or before.R_ineq.shape != after.R_ineq.shape:
        return True
    return not (np.array_equal(before.R_eq, after.R_eq)
                and np.array_equal(before.R_ineq, after.R_ineq))
