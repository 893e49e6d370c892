"""Stage 1: plant assembly and the storage certificate."""

from ..cli.scenario import subsystems_from_spec
from ..config import Config
from ..microgrid.scenarios import build_microgrid
from ..plant.compact import assemble_plant
from ..plant.passivity import certify_storage
from .base import AbstractStage
from .context import RunContext


class AssembleStage(AbstractStage):
    """Build the compact plant and certify its storage.

    A microgrid carries its physical energy weight, which is certified as is;
    generic plants get a Lyapunov-solved ``P1`` at ``tau1_fraction`` of the
    admissible rate unless the scenario fixes ``tau1``.
    """

    def __init__(self, config: Config):
        super().__init__(config, "assemble")

    def run(self, ctx: RunContext) -> int:
        scenario = ctx.scenario
        if scenario.microgrid is not None:
            case = build_microgrid(scenario.microgrid, scenario.faults)
            ctx.case = case
            ctx.plant = case.plant
        else:
            subsystems, imap = subsystems_from_spec(scenario.generic or {})
            ctx.plant = assemble_plant(subsystems, imap)

        plant = ctx.plant
        ctx.storage = certify_storage(
            plant, tau1=scenario.controller.tau1, tau1_fraction=self.config.tau1_fraction
        )

        self.logger.info(
            f"Plant n={plant.dims.n}, m={plant.dims.m}, {len(plant.subsystems)} subsystems; "
            f"storage '{ctx.storage.source}' tau1={ctx.storage.tau1:.4g}, "
            f"kyp residual={ctx.storage.kyp_residual:.2e}"
        )
        return len(plant.subsystems)
