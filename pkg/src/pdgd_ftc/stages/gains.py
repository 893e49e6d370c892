"""Stage 3: dual gain and metric synthesis."""

from ..closedloop.coupling import tune_eta
from ..config import Config
from ..controller.gains import controller_gains
from .base import AbstractStage
from .context import RunContext


class GainsStage(AbstractStage):
    """Pick ``eta`` (fixed or auto-tuned) and synthesize ``c``, ``P2`` and the ports."""

    def __init__(self, config: Config):
        super().__init__(config, "gains")

    def run(self, ctx: RunContext) -> int:
        program = ctx.require("program")
        settings = ctx.scenario.controller
        rho = settings.rho if settings.rho is not None else self.config.default_rho
        epsilon = settings.epsilon if settings.epsilon is not None else self.config.default_epsilon

        if settings.eta == "auto":
            eta = tune_eta(program, epsilon, self.config.eta_safety)
            self.logger.info(f"Auto-tuned eta={eta:.6g}")
        else:
            eta = float(settings.eta)

        ctx.params = controller_gains(program, eta, rho=rho, epsilon=epsilon,
                                      override_c=settings.override_c)
        params = ctx.params
        self.logger.info(
            f"c={params.c:.4g} (c1={params.c1:.4g}, c2={params.c2:.4g}, c3={params.c3:.4g}), "
            f"tau2={params.tau2:.4g}, cond(P2)={params.cond_P2:.3g}"
        )
        return params.n_theta
