"""Run a directory of scenarios on a worker pool."""

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from ..common.status import ExitCode
from ..config import Config
from .pipeline import RunResult, run_scenario

logger = logging.getLogger("pipeline.sweep")

SCENARIO_SUFFIXES = (".json", ".yaml", ".yml")


@dataclass
class SweepResult:
    results: Dict[Path, RunResult] = field(default_factory=dict)

    @property
    def exit_code(self) -> ExitCode:
        """Worst per-scenario code; an empty sweep is OK."""
        codes = [result.exit_code for result in self.results.values()]
        return ExitCode(max(codes)) if codes else ExitCode.OK

    def summary(self) -> Dict[str, int]:
        return {path.name: int(result.exit_code) for path, result in sorted(self.results.items())}


def scenario_files(directory: Path) -> List[Path]:
    return sorted(p for p in Path(directory).iterdir()
                  if p.is_file() and p.suffix.lower() in SCENARIO_SUFFIXES)


def run_sweep(
    directory: Path,
    config: Config,
    seed: Optional[int] = None,
    max_workers: Optional[int] = None,
) -> SweepResult:
    """Run every scenario file in ``directory``, each into its own output folder.

    Args:
        directory: Folder of scenario files
        config: System configuration
        seed: Seed override shared by every run
        max_workers: Pool size (defaults to ``config.worker_threads``)

    Returns:
        Per-file results; ``exit_code`` is the maximum over them
    """
    files = scenario_files(directory)
    workers = max_workers or config.worker_threads
    logger.info(f"Sweeping {len(files)} scenarios from {directory} on {workers} workers")

    sweep = SweepResult()
    with ThreadPoolExecutor(max_workers=workers) as executor:
        future_to_path = {
            executor.submit(
                run_scenario, path, config, seed, config.output_dir / path.stem
            ): path
            for path in files
        }
        for future in as_completed(future_to_path):
            path = future_to_path[future]
            try:
                sweep.results[path] = future.result()
            except Exception as e:
                logger.error(f"Scenario {path.name} crashed: {e}", exc_info=True)
                sweep.results[path] = RunResult(exit_code=ExitCode.INVALID, context=None,
                                                report={"error": str(e)})
            logger.info(f"{path.name}: exit {int(sweep.results[path].exit_code)}")

    logger.info(f"Sweep finished with exit code {int(sweep.exit_code)}")
    return sweep
