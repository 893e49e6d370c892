"""Stage 5: closed-loop simulation."""

from typing import Union

import numpy as np

from ..closedloop.simulate import simulate
from ..common.linalg import as_vector
from ..config import Config
from ..program.oracle import solve_oracle
from .base import AbstractStage
from .context import RunContext


class SimulateStage(AbstractStage):
    """Resolve initial states and integrate the closed loop over the fault schedule."""

    def __init__(self, config: Config):
        super().__init__(config, "simulate")

    @staticmethod
    def _start(
        spec: Union[str, list], size: int, oracle: np.ndarray, name: str
    ) -> np.ndarray:
        if spec == "zero":
            return np.zeros(size)
        if spec == "oracle":
            return oracle.copy()
        return as_vector(spec, size, name=name)

    def run(self, ctx: RunContext) -> int:
        plant = ctx.require("plant")
        program = ctx.require("program")
        params = ctx.require("params")
        sim = ctx.scenario.simulation

        oracle_x = np.zeros(plant.dims.n)
        oracle_theta = np.zeros(params.n_theta)
        if "oracle" in (sim.x0, sim.theta0):
            point = solve_oracle(program, workers=self.config.worker_threads)
            oracle_x = point.xi[program.layout.x]
            oracle_theta = point.stacked()
        ctx.x0 = self._start(sim.x0, plant.dims.n, oracle_x, "x0")
        ctx.theta0 = self._start(sim.theta0, params.n_theta, oracle_theta, "theta0")

        ctx.trace = simulate(
            plant, params, program, ctx.faults, ctx.x0, ctx.theta0,
            dt=sim.dt, T=sim.T, record_every=sim.record_every,
            storage=ctx.storage, tau1_fraction=self.config.tau1_fraction,
        )
        trace = ctx.trace
        self.logger.info(
            f"{trace.n_steps} steps of dt<={trace.dt:.4g}, {len(trace)} samples, "
            f"{len(trace.events)} events applied"
        )
        return len(trace)
