"""Trace CSV and summary report of a scenario run."""

import logging
from pathlib import Path
from typing import Any, Dict, Optional

from ..closedloop.simulate import Trace
from ..common.status import ExitCode
from ..common.tabular import atomic_write_csv, atomic_write_json
from ..controller.gains import gains_report
from ..stages.context import RunContext

logger = logging.getLogger(__name__)


def emit_trace(trace: Trace, path: Path) -> None:
    """Write the trace as CSV; an empty trace gives a header-only file."""
    atomic_write_csv(trace.to_frame(), Path(path))
    logger.info(f"Trace with {len(trace)} rows written to {path}")


def build_report(ctx: RunContext, exit_code: ExitCode,
                 trace_path: Optional[Path] = None) -> Dict[str, Any]:
    """Summary of one run; fields of stages that did not run are ``None``."""
    report: Dict[str, Any] = {
        "scenario": ctx.scenario.name,
        "status": str(ctx.status),
        "exit_code": int(exit_code),
        "error": ctx.error,
        "seed": ctx.seed,
        "beta": None,
        "eta": None,
        "minimal_eta": None,
        "eta_condition_ok": None,
        "c": None,
        "tau1": ctx.storage.tau1 if ctx.storage is not None else None,
        "tau2": None,
        "tau2e": None,
        "tau": None,
        "gamma_f": None,
        "dwell_time": ctx.dwell_time,
        "dwell_ok": ctx.dwell_ok,
        "final_kkt_residuals": None,
        "certificates": ctx.certificates.to_dict() if ctx.certificates is not None else None,
    }
    if ctx.storage is not None:
        report["storage"] = {
            "source": ctx.storage.source,
            "tau1": ctx.storage.tau1,
            "slack": ctx.storage.residual,
            "kyp_residual": ctx.storage.kyp_residual,
        }
    if ctx.params is not None:
        params = ctx.params
        report["eta"] = params.eta
        report["c"] = {"c1": params.c1, "c2": params.c2, "c3": params.c3, "c": params.c}
        report["tau2"] = params.tau2
        report["gains"] = gains_report(params)
    if ctx.margin is not None:
        report.update({
            key: value for key, value in ctx.margin.as_dict().items()
            if key in ("beta", "eta", "minimal_eta", "eta_condition_ok", "tau1", "tau2",
                       "tau2e", "tau")
        })
    failure = ctx.extras.get("tuning_failure")
    if failure is not None:
        # a post-fault violation overrides the pre-fault margin
        report.update(failure)
        report["eta_condition_ok"] = False
    if ctx.trace is not None:
        report["final_kkt_residuals"] = ctx.trace.final_kkt
        report["trace"] = {
            "path": str(trace_path) if trace_path is not None else None,
            "samples": len(ctx.trace),
            "dt": ctx.trace.dt,
            "steps": ctx.trace.n_steps,
            "events": [
                {"time": a.time, "event": a.event.describe()} for a in ctx.trace.events
            ],
        }
    if ctx.envelope is not None:
        report["gamma_f"] = ctx.envelope.gamma_f
        report["envelope"] = ctx.envelope.as_dict()
    elif ctx.trace is not None:
        report["gamma_f"] = 1.0
    return report


def write_report(report: Dict[str, Any], path: Path) -> None:
    atomic_write_json(report, Path(path))
    logger.info(f"Report written to {path}")
