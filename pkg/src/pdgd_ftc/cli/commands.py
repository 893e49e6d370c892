"""CLI commands using Click."""

import sys
from pathlib import Path
from typing import Optional

import click

from .. import __version__
from ..common.logging import configure_library_logging
from ..common.status import ExitCode
from ..common.tabular import to_json_text
from ..config import Config
from ..orchestrator import CERTIFY_ONLY, GAINS_ONLY, run_scenario, run_sweep


@click.group()
@click.version_option(version=__version__)
def cli() -> None:
    """pdgd-ftc - Fault-tolerant steady-state regulation with augmented primal-dual control."""
    pass


@cli.command()
@click.argument("config", required=False, type=click.Path(exists=True, dir_okay=False))
@click.option("--sweep", "sweep_dir", type=click.Path(exists=True, file_okay=False),
              help="Run every scenario file in this directory")
@click.option("--seed", type=int, default=None, help="Seed for randomized certificates")
@click.option("--verbose", "-v", is_flag=True, help="Verbose output")
def run(config: Optional[str], sweep_dir: Optional[str], seed: Optional[int],
        verbose: bool) -> None:
    """Run a scenario: synthesis, simulation, monitoring and certificates."""
    if (config is None) == (sweep_dir is None):
        click.echo("✗ Give exactly one of CONFIG or --sweep DIR", err=True)
        sys.exit(int(ExitCode.INVALID))
    cfg = _load_config(verbose)

    if sweep_dir is not None:
        sweep = run_sweep(Path(sweep_dir), cfg, seed=seed)
        for name, code in sweep.summary().items():
            mark = "✓" if code == 0 else "✗"
            click.echo(f"{mark} {name}: exit {code}")
        sys.exit(int(sweep.exit_code))

    result = run_scenario(Path(config), cfg, seed=seed)  # type: ignore[arg-type]
    report = result.report or {}
    if result.exit_code == ExitCode.OK:
        click.echo(f"✓ Scenario completed - report: {result.report_path}")
        certificates = report.get("certificates") or {}
        failed = [k for k, v in certificates.get("verdicts", {}).items() if v == "fail"]
        if failed:
            click.echo(f"✗ Certificates failed: {', '.join(failed)}", err=True)
    elif result.exit_code == ExitCode.TUNING:
        click.echo(f"✗ Tuning condition violated: {report.get('error')}", err=True)
        click.echo(f"  suggested eta > {report.get('minimal_eta')}", err=True)
    elif result.exit_code == ExitCode.DIVERGENCE:
        click.echo(f"✗ Simulation diverged: {report.get('error')}", err=True)
    else:
        click.echo(f"✗ Scenario rejected: {report.get('error')}", err=True)
        for pointer in report.get("violations", []):
            click.echo(f"  {pointer or '/'}", err=True)
    sys.exit(int(result.exit_code))


@cli.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", type=int, default=None, help="Seed for randomized certificates")
@click.option("--verbose", "-v", is_flag=True, help="Verbose output")
def certify(config: str, seed: Optional[int], verbose: bool) -> None:
    """Synthesize gains and run the certificates without simulating."""
    cfg = _load_config(verbose)
    result = run_scenario(Path(config), cfg, seed=seed, names=CERTIFY_ONLY)
    report = result.report or {}
    if result.exit_code != ExitCode.OK:
        click.echo(f"✗ Certification stopped: {report.get('error')}", err=True)
        sys.exit(int(result.exit_code))

    certificates = report.get("certificates") or {}
    click.echo(to_json_text(certificates), nl=False)
    failed = [k for k, v in certificates.get("verdicts", {}).items() if v == "fail"]
    if failed:
        click.echo(f"✗ Certificates failed: {', '.join(failed)}", err=True)
        sys.exit(int(ExitCode.INVALID))
    click.echo("✓ All certificates passed", err=True)


@cli.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@click.option("--verbose", "-v", is_flag=True, help="Verbose output")
def gains(config: str, verbose: bool) -> None:
    """Print the synthesized gains as JSON."""
    cfg = _load_config(verbose)
    result = run_scenario(Path(config), cfg, names=GAINS_ONLY)
    report = result.report or {}
    if result.exit_code != ExitCode.OK:
        click.echo(f"✗ Gain synthesis failed: {report.get('error')}", err=True)
        sys.exit(int(result.exit_code))
    click.echo(to_json_text(report.get("gains", {})), nl=False)


def _load_config(verbose: bool = False) -> Config:
    """Load configuration from the environment (and ``.env`` when present).

    Args:
        verbose: Force DEBUG logging

    Returns:
        Config instance
    """
    env_file = Path(".env")
    cfg = Config.from_env(env_file if env_file.exists() else None)
    if verbose:
        cfg.log_level = "DEBUG"
    cfg.ensure_directories()
    configure_library_logging(cfg.log_level)
    return cfg


if __name__ == "__main__":
    cli()
