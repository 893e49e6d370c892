"""Shared helpers: errors, verdicts, logging, dense numerics and output."""

from .errors import (
    DimensionError,
    DivergenceError,
    FtcError,
    InfeasibleError,
    NumericError,
    PreconditionError,
    RankError,
    ScenarioError,
    StructuralError,
    TuningError,
    UnsupportedError,
)
from .status import ExitCode, RunStatus, Verdict

__all__ = [
    "DimensionError",
    "DivergenceError",
    "ExitCode",
    "FtcError",
    "InfeasibleError",
    "NumericError",
    "PreconditionError",
    "RankError",
    "RunStatus",
    "ScenarioError",
    "StructuralError",
    "TuningError",
    "UnsupportedError",
    "Verdict",
]
