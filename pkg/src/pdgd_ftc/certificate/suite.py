"""Run every controller certificate and collect a summary."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from ..common.errors import UnsupportedError
from ..common.status import Verdict
from ..controller.gains import ControllerParams
from ..program.program import SteadyStateProgram
from .floor import p2_floor
from .margin import RATIO_FLOOR, delta_margin
from .shifted import q_certificate
from .vertex import VERTEX_CAP, VERTEX_SAMPLES, vertex_inequality

logger = logging.getLogger(__name__)

FLOOR_TOL = 1e-9


@dataclass
class CertificateSummary:
    """Scalar results of the certificate checks, each with a verdict."""

    p2_floor_margin: float
    q_min_eig: Optional[float]
    vertex_worst_margin: Optional[float]
    delta: float
    delta_ratio: float
    verdicts: Dict[str, Verdict] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v.ok or v is Verdict.SKIPPED for v in self.verdicts.values())

    def failures(self) -> Dict[str, Verdict]:
        return {name: v for name, v in self.verdicts.items() if v is Verdict.FAIL}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p2_floor_margin": self.p2_floor_margin,
            "q_min_eig": self.q_min_eig,
            "vertex_worst_margin": self.vertex_worst_margin,
            "delta": self.delta,
            "delta_ratio": self.delta_ratio,
            "verdicts": {name: str(v) for name, v in self.verdicts.items()},
        }


def run_certificates(
    params: ControllerParams,
    program: SteadyStateProgram,
    q_samples: int = 100,
    vertex_cap: int = VERTEX_CAP,
    vertex_samples: int = VERTEX_SAMPLES,
    seed: int = 0,
    workers: int = 1,
    psd_tolerance: float = 1e-8,
    H: Optional[np.ndarray] = None,
) -> CertificateSummary:
    """Floor, Q, vertex and margin checks for one program and gain set.

    The Q check is skipped for non-quadratic costs unless ``H`` is supplied.
    """
    verdicts: Dict[str, Verdict] = {}

    floor = p2_floor(params)
    floor_ok = floor >= -FLOOR_TOL * max(1.0, params.c)
    verdicts["p2_floor"] = Verdict.PASS if floor_ok else Verdict.FAIL

    q_min: Optional[float]
    try:
        q_report = q_certificate(params, program, samples=q_samples, seed=seed, H=H,
                                 tol=psd_tolerance)
        q_min = q_report.min_eig
        verdicts["q_matrix"] = q_report.verdict
    except UnsupportedError as e:
        logger.warning(f"Q certificate skipped: {e}")
        q_min = None
        verdicts["q_matrix"] = Verdict.SKIPPED

    vertex_min: Optional[float] = None
    if program.n_c:
        v_report = vertex_inequality(
            program.R, params.eta, params.rho, params.c,
            cap=vertex_cap, samples=vertex_samples, seed=seed, workers=workers,
            tol=psd_tolerance,
        )
        vertex_min = v_report.worst_margin
        verdicts["vertex"] = v_report.verdict
    else:
        verdicts["vertex"] = Verdict.SKIPPED

    margin = delta_margin(params.eta, params.rho, params.mu, params.ell,
                          params.kappa1, params.kappa2)
    ok = margin.positive and margin.ratio >= RATIO_FLOOR - 1e-9
    verdicts["delta"] = Verdict.PASS if ok else Verdict.FAIL

    summary = CertificateSummary(
        p2_floor_margin=floor,
        q_min_eig=q_min,
        vertex_worst_margin=vertex_min,
        delta=margin.delta,
        delta_ratio=margin.ratio,
        verdicts=verdicts,
    )
    for name, verdict in summary.failures().items():
        logger.warning(f"Certificate {name} failed")
    return summary
