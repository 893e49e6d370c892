"""Stage 2: steady-state program and fault schedule."""

from ..cli.scenario import cost_from_spec, faults_from_spec, templates_from_spec
from ..closedloop.faults import validate_schedule
from ..config import Config
from ..program.program import assemble_program
from .base import AbstractStage
from .context import RunContext


class ProgramStage(AbstractStage):
    """Stack the program and validate the fault schedule against the horizon."""

    def __init__(self, config: Config):
        super().__init__(config, "program")

    def run(self, ctx: RunContext) -> int:
        plant = ctx.require("plant")
        scenario = ctx.scenario
        if ctx.case is not None:
            ctx.program = ctx.case.program
            faults = ctx.case.faults
        else:
            spec = scenario.generic or {}
            cost = cost_from_spec(spec["cost"], plant.C)
            ctx.program = assemble_program(plant, templates_from_spec(spec), cost)
            faults = faults_from_spec(scenario.faults)
        ctx.faults = validate_schedule(faults, scenario.simulation.T)

        program = ctx.program
        self.logger.info(
            f"Program n_xi={program.n_xi}, n_eq={program.n_eq}, n_ineq={program.n_ineq}, "
            f"sigma_min={program.sigma_min:.3e}; {len(ctx.faults)} scheduled faults"
        )
        return program.n_c
