"""Stage 7: controller certificates."""

from typing import Optional

from ..certificate.suite import run_certificates
from ..config import Config
from .base import AbstractStage
from .context import RunContext


def pick(value: Optional[int], default: int) -> int:
    return default if value is None else value


class CertifyStage(AbstractStage):
    """Run the floor, Q, vertex and margin checks on the pre-fault program."""

    def __init__(self, config: Config):
        super().__init__(config, "certify")

    def run(self, ctx: RunContext) -> int:
        params = ctx.require("params")
        program = ctx.require("program")
        settings = ctx.scenario.certificates
        if not settings.enabled:
            self.logger.info("Certificates disabled for this scenario")
            return 0

        ctx.certificates = run_certificates(
            params,
            program,
            q_samples=pick(settings.q_samples, self.config.q_samples),
            vertex_cap=pick(settings.vertex_cap, self.config.vertex_cap),
            vertex_samples=pick(settings.vertex_samples, self.config.vertex_samples),
            seed=ctx.seed,
            workers=self.config.worker_threads,
            psd_tolerance=self.config.psd_tolerance,
        )
        summary = ctx.certificates
        if summary.passed:
            self.logger.info(f"All certificates passed: {summary.to_dict()['verdicts']}")
        else:
            self.logger.warning(f"Certificate failures: {sorted(summary.failures())}")
        return len(summary.verdicts)
