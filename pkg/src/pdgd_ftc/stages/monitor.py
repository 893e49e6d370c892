"""Stage 6: storage envelope, jump factors and dwell time."""

import math

import numpy as np

from ..closedloop.monitor import dwell_time, lyapunov_monitor
from ..config import Config
from .base import AbstractStage
from .context import RunContext


class MonitorStage(AbstractStage):
    """Evaluate ``S(t)`` per segment and compare fault spacing with the dwell time."""

    def __init__(self, config: Config):
        super().__init__(config, "monitor")

    def run(self, ctx: RunContext) -> int:
        trace = ctx.require("trace")
        margin = ctx.require("margin")

        if not len(trace):
            self.logger.warning("Empty trace; nothing to monitor")
            ctx.dwell_time, ctx.dwell_ok = 0.0, True
            return 0

        # post-fault segments carry their own storage and may certify a slower rate
        tau = min([margin.tau] + [s.margin.tau for s in trace.segments if s.margin is not None])
        ctx.envelope = lyapunov_monitor(trace, tau=tau)
        gamma_f = ctx.envelope.gamma_f
        if not math.isfinite(gamma_f):
            ctx.dwell_time = math.inf
        elif gamma_f > 1.0 and tau > 0.0:
            ctx.dwell_time = dwell_time(gamma_f, tau)
        else:
            ctx.dwell_time = 0.0

        times = [event.time for event in trace.events]
        gaps = np.diff(times) if len(times) > 1 else np.zeros(0)
        ctx.dwell_ok = bool(np.all(gaps >= ctx.dwell_time))
        if not ctx.dwell_ok:
            self.logger.warning(
                f"Fault spacing {gaps.min():.4g} s below the sufficient dwell time "
                f"{ctx.dwell_time:.4g} s (gamma_f={gamma_f:.4g})"
            )
        self.logger.info(
            f"Envelope monotone={ctx.envelope.monotone}, fitted rate="
            f"{ctx.envelope.fitted_rate}, gamma_f={gamma_f:.4g}"
        )
        return len(ctx.envelope.segments)
