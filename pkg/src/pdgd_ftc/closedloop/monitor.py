"""Composite storage along a trace, its envelope and dwell times."""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..common.errors import InfeasibleError, PreconditionError, UnsupportedError
from ..common.linalg import as_matrix
from ..program.oracle import solve_oracle
from .simulate import Segment, Trace

logger = logging.getLogger(__name__)

MONOTONE_TOL = 1e-9
# samples below this fraction of the segment peak are roundoff, not decay
FIT_FLOOR = 1e-20


def composite_storage(
    x: np.ndarray, theta: np.ndarray, x_bar: np.ndarray, theta_bar: np.ndarray,
    P1: np.ndarray, P2: np.ndarray,
) -> np.ndarray:
    """``S = x~'P1 x~ / 2 + theta~'P2 theta~`` for one sample or a stack of rows."""
    dx = np.atleast_2d(x) - x_bar
    dth = np.atleast_2d(theta) - theta_bar
    S = 0.5 * np.einsum("ki,ij,kj->k", dx, P1, dx) + np.einsum("ki,ij,kj->k", dth, P2, dth)
    return S


@dataclass(frozen=True)
class SegmentEquilibrium:
    x_bar: Optional[np.ndarray]
    theta_bar: Optional[np.ndarray]
    source: str


def segment_equilibrium(segment: Segment, trace: Trace) -> SegmentEquilibrium:
    """Oracle KKT point of the segment's program, or the last sample as a surrogate."""
    program = segment.program
    try:
        point = solve_oracle(program)
    except UnsupportedError as e:
        if segment.last < segment.first:
            return SegmentEquilibrium(None, None, "unavailable")
        logger.warning(f"Oracle unsupported for segment at t={segment.start:g} ({e}); "
                       f"using the last sample as surrogate equilibrium")
        return SegmentEquilibrium(trace.x[segment.last], trace.theta[segment.last], "surrogate")
    except InfeasibleError as e:
        logger.warning(f"Segment at t={segment.start:g} flagged: {e}")
        return SegmentEquilibrium(None, None, "infeasible")
    return SegmentEquilibrium(point.xi[program.layout.x], point.stacked(), "oracle")


@dataclass
class SegmentEnvelope:
    start: float
    stop: float
    source: str
    max_increase: float
    peak: float
    fitted_rate: Optional[float]

    @property
    def monotone(self) -> bool:
        return self.max_increase <= MONOTONE_TOL * max(self.peak, 0.0)


@dataclass
class EventJump:
    time: float
    description: str
    S_before: float
    S_after: float

    @property
    def gamma_f(self) -> float:
        if self.S_before > 0.0:
            return max(1.0, self.S_after / self.S_before)
        return 1.0 if self.S_after <= 0.0 else math.inf


@dataclass
class EnvelopeReport:
    tau: float
    segments: List[SegmentEnvelope] = field(default_factory=list)
    jumps: List[EventJump] = field(default_factory=list)

    @property
    def monotone(self) -> bool:
        return all(seg.monotone for seg in self.segments if seg.source != "infeasible")

    @property
    def max_increase(self) -> float:
        return max((seg.max_increase for seg in self.segments), default=0.0)

    @property
    def fitted_rate(self) -> Optional[float]:
        """Slowest fitted rate over the segments that admit a fit."""
        rates = [seg.fitted_rate for seg in self.segments if seg.fitted_rate is not None]
        return min(rates) if rates else None

    @property
    def rate_ok(self) -> bool:
        rate = self.fitted_rate
        return rate is None or rate >= self.tau

    @property
    def gamma_f(self) -> float:
        return max((jump.gamma_f for jump in self.jumps), default=1.0)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "tau": self.tau,
            "monotone": self.monotone,
            "max_increase": self.max_increase,
            "fitted_rate": self.fitted_rate,
            "rate_ok": self.rate_ok,
            "gamma_f": self.gamma_f,
            "segments": [
                {"start": s.start, "stop": s.stop, "source": s.source,
                 "max_increase": s.max_increase, "fitted_rate": s.fitted_rate}
                for s in self.segments
            ],
            "events": [
                {"time": j.time, "event": j.description, "S_before": j.S_before,
                 "S_after": j.S_after, "gamma_f": j.gamma_f}
                for j in self.jumps
            ],
        }


def fit_decay_rate(times: np.ndarray, S: np.ndarray) -> Optional[float]:
    """Least-squares ``-slope / 2`` of ``log S`` over samples above the roundoff floor."""
    if S.size < 3 or not np.any(S > 0.0):
        return None
    keep = np.isfinite(S) & (S > FIT_FLOOR * np.max(S))
    if np.count_nonzero(keep) < 3:
        return None
    slope, _ = np.polyfit(times[keep], np.log(S[keep]), 1)
    return float(-slope / 2.0)


def _storage_weight(segment: Segment, P1: Optional[np.ndarray]) -> np.ndarray:
    if P1 is not None:
        return P1
    if segment.storage is None:
        raise PreconditionError(
            f"segment at t={segment.start:g} carries no storage certificate; pass P1"
        )
    return segment.storage.P1


def lyapunov_monitor(
    trace: Trace,
    P1: Optional[np.ndarray] = None,
    P2: Optional[np.ndarray] = None,
    tau: float = 0.0,
) -> EnvelopeReport:
    """Fill ``trace.S`` and check the storage envelope segment by segment.

    Args:
        trace: Simulated run
        P1: Plant storage weight; defaults to each segment's certified one
        P2: Controller metric; defaults to each segment's own
        tau: Certified decay rate the fitted rates are compared with

    Raises:
        PreconditionError: Empty trace, or no weight for a segment
    """
    if not len(trace):
        raise PreconditionError("trace has no samples")
    n = trace.x.shape[1]
    if P1 is not None:
        P1 = as_matrix(P1, rows=n, cols=n, name="P1")

    report = EnvelopeReport(tau=tau)
    equilibria: List[Tuple[Segment, SegmentEquilibrium]] = []
    S = np.full(len(trace), np.nan)
    for segment in trace.segments:
        eq = segment_equilibrium(segment, trace)
        equilibria.append((segment, eq))
        rows = slice(segment.first, segment.last + 1)
        if eq.x_bar is None or segment.last < segment.first:
            report.segments.append(SegmentEnvelope(
                segment.start, segment.stop, eq.source, 0.0, 0.0, None))
            continue
        metric = segment.params.P2 if P2 is None else P2
        S_seg = composite_storage(trace.x[rows], trace.theta[rows], eq.x_bar, eq.theta_bar,
                                  _storage_weight(segment, P1), metric)
        S[rows] = S_seg
        increases = np.diff(S_seg)
        rate = fit_decay_rate(trace.times[rows], S_seg) if eq.source == "oracle" else None
        report.segments.append(SegmentEnvelope(
            start=segment.start,
            stop=segment.stop,
            source=eq.source,
            max_increase=float(max(np.max(increases, initial=0.0), 0.0)),
            peak=float(np.max(S_seg)),
            fitted_rate=rate,
        ))
    trace.S = S

    for applied in trace.events:
        before = _segment_ending_at(equilibria, applied.time)
        after = _segment_starting_at(equilibria, applied.time)
        if before is None or after is None:
            continue
        (seg_b, eq_b), (seg_a, eq_a) = before, after
        if eq_b.x_bar is None or eq_a.x_bar is None:
            continue
        x_e, th_e = applied.state[:n], applied.state[n:]
        P2_b = seg_b.params.P2 if P2 is None else P2
        P2_a = seg_a.params.P2 if P2 is None else P2
        P1_b, P1_a = _storage_weight(seg_b, P1), _storage_weight(seg_a, P1)
        report.jumps.append(EventJump(
            time=applied.time,
            description=applied.event.describe(),
            S_before=float(composite_storage(x_e, th_e, eq_b.x_bar, eq_b.theta_bar, P1_b, P2_b)[0]),
            S_after=float(composite_storage(x_e, th_e, eq_a.x_bar, eq_a.theta_bar, P1_a, P2_a)[0]),
        ))

    if not report.monotone:
        logger.warning(f"Storage increased by {report.max_increase:.3e} inside a segment")
    if not report.rate_ok:
        logger.warning(f"Fitted decay rate {report.fitted_rate:.3e} below tau={tau:.3e}")
    return report


def _segment_ending_at(
    pairs: List[Tuple[Segment, SegmentEquilibrium]], time: float
) -> Optional[Tuple[Segment, SegmentEquilibrium]]:
    for segment, eq in pairs:
        if segment.stop == time and segment.start < time:
            return segment, eq
    return None


def _segment_starting_at(
    pairs: List[Tuple[Segment, SegmentEquilibrium]], time: float
) -> Optional[Tuple[Segment, SegmentEquilibrium]]:
    for segment, eq in pairs:
        if segment.start == time:
            return segment, eq
    return None


def dwell_time(gamma_f: float, tau: float) -> float:
    """Sufficient inter-fault interval ``ln(gamma_f) / (2 tau)``.

    Raises:
        PreconditionError: ``gamma_f < 1`` or ``tau <= 0``
    """
    if gamma_f < 1.0:
        raise PreconditionError(f"jump factor must be >= 1, got {gamma_f}", bound=1.0)
    if tau <= 0.0:
        raise PreconditionError(f"decay rate must be positive, got {tau}", bound=0.0)
    return math.log(gamma_f) / (2.0 * tau)
