"""Orchestrator for running scenarios through the stage pipeline."""

from .pipeline import CERTIFY_ONLY, FULL_RUN, GAINS_ONLY, Pipeline, RunResult, run_scenario
from .sweep import SweepResult, run_sweep

__all__ = [
    "CERTIFY_ONLY",
    "FULL_RUN",
    "GAINS_ONLY",
    "Pipeline",
    "RunResult",
    "SweepResult",
    "run_scenario",
    "run_sweep",
]
