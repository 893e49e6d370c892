"""Stage 4: closed-loop tuning condition and decay rate."""

from ..closedloop.coupling import stability_margin
from ..config import Config
from .base import AbstractStage
from .context import RunContext


class MarginStage(AbstractStage):
    """Evaluate the tuning condition; a violation stops the pipeline with ``TuningError``."""

    def __init__(self, config: Config):
        super().__init__(config, "margin")

    def run(self, ctx: RunContext) -> int:
        params = ctx.require("params")
        storage = ctx.require("storage")
        ctx.margin = stability_margin(params, storage.tau1)
        margin = ctx.margin
        self.logger.info(
            f"beta={margin.beta:.4g}, eta={margin.eta:.4g} (minimal {margin.minimal_eta:.4g}), "
            f"tau1={margin.tau1:.4g}, tau2e={margin.tau2e:.4g}, tau={margin.tau:.4g}"
        )
        margin.require()
        return 1
