"""State handed from one pipeline stage to the next."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ..certificate.suite import CertificateSummary
from ..cli.scenario import ScenarioConfig
from ..closedloop.coupling import StabilityMargin
from ..closedloop.faults import FaultEvent
from ..closedloop.monitor import EnvelopeReport
from ..closedloop.simulate import Trace
from ..common.status import RunStatus
from ..controller.gains import ControllerParams
from ..microgrid.scenarios import MicrogridCase
from ..plant.compact import CompactPlant
from ..plant.passivity import PassivityCertificate
from ..program.program import SteadyStateProgram


@dataclass(eq=False)
class RunContext:
    """Artifacts of one scenario run; each stage fills its own fields."""

    scenario: ScenarioConfig
    seed: int = 0
    plant: Optional[CompactPlant] = None
    program: Optional[SteadyStateProgram] = None
    faults: List[FaultEvent] = field(default_factory=list)
    case: Optional[MicrogridCase] = None
    storage: Optional[PassivityCertificate] = None
    params: Optional[ControllerParams] = None
    margin: Optional[StabilityMargin] = None
    x0: Optional[np.ndarray] = None
    theta0: Optional[np.ndarray] = None
    trace: Optional[Trace] = None
    envelope: Optional[EnvelopeReport] = None
    dwell_time: Optional[float] = None
    dwell_ok: Optional[bool] = None
    certificates: Optional[CertificateSummary] = None
    status: RunStatus = RunStatus.COMPLETED
    error: Optional[str] = None
    extras: Dict[str, Any] = field(default_factory=dict)

    def require(self, name: str) -> Any:
        """Field set by an earlier stage; a missing one is a pipeline ordering bug."""
        value = getattr(self, name)
        if value is None:
            raise RuntimeError(f"stage needs {name!r}, which no earlier stage produced")
        return value
