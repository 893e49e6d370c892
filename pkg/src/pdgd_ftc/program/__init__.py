"""Steady-state optimization program, KKT residuals and the reference oracle."""

from .cost import CallbackCost, CostFunction, QuadraticCost, finite_difference_gradient
from .oracle import solve_oracle
from .program import (
    KKTPoint,
    Layout,
    ProgramSource,
    ResidualReport,
    SteadyStateProgram,
    assemble_program,
    kkt_residual,
    spectral_bounds,
)
from .templates import ConstraintTemplate

__all__ = [
    "CallbackCost",
    "ConstraintTemplate",
    "CostFunction",
    "KKTPoint",
    "Layout",
    "ProgramSource",
    "QuadraticCost",
    "ResidualReport",
    "SteadyStateProgram",
    "assemble_program",
    "finite_difference_gradient",
    "kkt_residual",
    "solve_oracle",
    "spectral_bounds",
]
