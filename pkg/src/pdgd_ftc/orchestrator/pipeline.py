"""Pipeline orchestrator: one scenario through every stage in order."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from ..cli.report import build_report, emit_trace, write_report
from ..cli.scenario import ScenarioConfig, load_scenario
from ..common.errors import DivergenceError, FtcError, ScenarioError, TuningError
from ..common.status import ExitCode, RunStatus
from ..config import Config
from ..stages import (
    AbstractStage,
    AssembleStage,
    CertifyStage,
    GainsStage,
    MarginStage,
    MonitorStage,
    ProgramStage,
    RunContext,
    SimulateStage,
)

FULL_RUN = ("assemble", "program", "gains", "margin", "simulate", "monitor", "certify")
CERTIFY_ONLY = ("assemble", "program", "gains", "margin", "certify")
GAINS_ONLY = ("assemble", "program", "gains")


@dataclass
class RunResult:
    """Outcome of one scenario: exit code, context and written files."""

    exit_code: ExitCode
    context: Optional[RunContext]
    trace_path: Optional[Path] = None
    report_path: Optional[Path] = None
    report: Optional[Dict] = None


class Pipeline:
    """Orchestrate the stages of a scenario run."""

    def __init__(self, config: Config, output_dir: Optional[Path] = None):
        """Initialize pipeline.

        Args:
            config: System configuration
            output_dir: Where traces and reports go (defaults to ``config.output_dir``)
        """
        self.config = config
        self.output_dir = Path(output_dir) if output_dir is not None else config.output_dir
        self.logger = logging.getLogger("pipeline")

        stages: List[AbstractStage] = [
            AssembleStage(config),
            ProgramStage(config),
            GainsStage(config),
            MarginStage(config),
            SimulateStage(config),
            MonitorStage(config),
            CertifyStage(config),
        ]
        self.stages: Dict[str, AbstractStage] = {stage.stage_name: stage for stage in stages}

    def run_stages(self, ctx: RunContext, names: Sequence[str] = FULL_RUN) -> ExitCode:
        """Run the named stages in order; errors end the run with their exit code."""
        try:
            for name in names:
                self.stages[name](ctx)
        except TuningError as e:
            ctx.status, ctx.error = RunStatus.TUNING_FAILED, str(e)
            ctx.extras["tuning_failure"] = {
                "eta": e.eta, "minimal_eta": e.minimal_eta, "beta": e.beta,
            }
            self.logger.error(f"Tuning failed: {e} (minimal eta {e.minimal_eta:.6g})")
        except DivergenceError as e:
            ctx.status, ctx.error = RunStatus.DIVERGED, str(e)
            self.logger.error(f"Diverged after t={e.last_finite_time:g}: {e}")
        except FtcError as e:
            ctx.status, ctx.error = RunStatus.INVALID, str(e)
            self.logger.error(f"Scenario {ctx.scenario.name!r} rejected: {e}")
        return ExitCode.for_status(ctx.status)

    def run_scenario(
        self,
        scenario: ScenarioConfig,
        seed: Optional[int] = None,
        names: Sequence[str] = FULL_RUN,
        write: bool = True,
    ) -> RunResult:
        """Run one loaded scenario and write its trace and report."""
        ctx = RunContext(scenario=scenario, seed=self.config.seed if seed is None else seed)
        self.logger.info(f"Starting scenario {scenario.name!r} ({scenario.kind})")
        exit_code = self.run_stages(ctx, names)

        trace_path, report_path = scenario.output_paths(self.output_dir)
        written_trace = None
        if write and ctx.trace is not None:
            emit_trace(ctx.trace, trace_path)
            written_trace = trace_path
        report = build_report(ctx, exit_code, written_trace)
        if write:
            write_report(report, report_path)
        self.logger.info(f"Scenario {scenario.name!r} finished: {ctx.status} (exit {exit_code})")
        return RunResult(
            exit_code=exit_code,
            context=ctx,
            trace_path=written_trace,
            report_path=report_path if write else None,
            report=report,
        )


def run_scenario(
    config_path: Path,
    config: Config,
    seed: Optional[int] = None,
    output_dir: Optional[Path] = None,
    names: Sequence[str] = FULL_RUN,
) -> RunResult:
    """Load, validate and run one scenario file.

    Schema violations yield ``ExitCode.INVALID`` without running any stage.
    """
    logger = logging.getLogger("pipeline")
    try:
        scenario = load_scenario(Path(config_path))
    except ScenarioError as e:
        for pointer, message in e.violations:
            logger.error(f"{config_path}: {pointer or '/'}: {message}")
        return RunResult(exit_code=ExitCode.INVALID, context=None,
                         report={"error": str(e), "violations": e.pointers()})
    return Pipeline(config, output_dir).run_scenario(scenario, seed=seed, names=names)
