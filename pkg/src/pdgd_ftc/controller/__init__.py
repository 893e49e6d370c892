"""Augmented primal-dual controller: penalty, gain synthesis and vector field."""

from .dynamics import ControllerField, ControllerState, controller_rhs
from .gains import (
    ControllerParams,
    GainBounds,
    controller_gains,
    gain_bounds,
    gains_report,
    metric_matrix,
    port_selectors,
    program_kappas,
    synthesize_params,
)
from .penalty import clip_multiplier, penalty_h

__all__ = [
    "ControllerField",
    "ControllerParams",
    "ControllerState",
    "GainBounds",
    "clip_multiplier",
    "controller_gains",
    "controller_rhs",
    "gain_bounds",
    "gains_report",
    "metric_matrix",
    "penalty_h",
    "port_selectors",
    "program_kappas",
    "synthesize_params",
]
