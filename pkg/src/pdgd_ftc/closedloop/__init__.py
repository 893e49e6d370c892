"""Closed loop: interconnection, tuning, simulation and storage monitoring."""

from .coupling import (
    StabilityMargin,
    auto_eta,
    coupling,
    cross_coupling,
    minimal_eta,
    stability_margin,
    tune_eta,
)
from .faults import FaultEvent, FaultKind, apply_fault, kappas_changed, validate_schedule
from .monitor import (
    EnvelopeReport,
    composite_storage,
    dwell_time,
    fit_decay_rate,
    lyapunov_monitor,
    segment_equilibrium,
)
from .simulate import (
    ClosedLoop,
    Trace,
    integrate_fixed_step,
    measured_kkt,
    rk4_step,
    simulate,
    stiffness_bound,
)

__all__ = [
    "ClosedLoop",
    "EnvelopeReport",
    "FaultEvent",
    "FaultKind",
    "StabilityMargin",
    "Trace",
    "apply_fault",
    "auto_eta",
    "composite_storage",
    "coupling",
    "cross_coupling",
    "dwell_time",
    "fit_decay_rate",
    "integrate_fixed_step",
    "kappas_changed",
    "lyapunov_monitor",
    "measured_kkt",
    "minimal_eta",
    "rk4_step",
    "segment_equilibrium",
    "simulate",
    "stability_margin",
    "stiffness_bound",
    "tune_eta",
    "validate_schedule",
]
