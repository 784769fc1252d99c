"""
Command-line entry point.
Runs one verification command and writes its JSON (and optional CSV) report.
"""

import logging
import sys
from typing import Any, Callable, Optional

import click
from dotenv import load_dotenv
from loguru import logger

from hyperphg.exceptions import ConfigError, HyperPhgError
from hyperphg.models import CommandName, Report
from hyperphg.orchestrator import cmd_weight_scan, run_command
from hyperphg.reports import export_csv, write_json

from .config import load_config, resolve_output

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2


def configure_logging(level: str) -> None:
    """loguru for the CLI, stdlib root logger for the engine modules."""
    level = level.upper()
    logger.remove()
    logger.add(sys.stderr, level=level, format="{time:HH:mm:ss} | {level: <8} | {message}")
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        force=True,
    )


def run_options(func: Callable[..., Any]) -> Callable[..., Any]:
    """Flags shared by every command."""
    func = click.option("--csv", "csv", is_flag=True, help="Also write CSV tables.")(func)
    func = click.option("--out", type=click.Path(dir_okay=False), help="JSON report path.")(func)
    func = click.option("--seed", type=int, help="Override [run] seed.")(func)
    func = click.option(
        "--config", "config_path", type=click.Path(dir_okay=False), help="INI run file."
    )(func)
    return func


def execute(
    command: CommandName,
    config_path: Optional[str],
    seed: Optional[int],
    out: Optional[str],
    csv: bool,
    grid: bool = False,
) -> None:
    """Load the config, run the command, write reports and exit with its status."""
    try:
        config = load_config(config_path, seed)
    except ConfigError as exc:
        logger.error(str(exc))
        for problem in exc.problems:
            logger.error(f"  {problem}")
        click.echo(f"config error: {exc}", err=True)
        for problem in exc.problems:
            click.echo(f"  {problem}", err=True)
        sys.exit(EXIT_CONFIG)

    logger.info(f"Running {command.value} with seed {config.run.seed}")
    try:
        if command == CommandName.WEIGHT_SCAN:
            report: Report = cmd_weight_scan(
                config, with_grid=csv, certify_grid=grid or config.weights.admissible_grid
            )
        else:
            report = run_command(config, command)
    except HyperPhgError as exc:
        logger.error(f"{command.value} failed: {exc}")
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_FAIL)
    except ValueError as exc:
        # Unknown scenario names and malformed problem data surface here.
        logger.error(f"{command.value}: {exc}")
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)

    path = write_json(report, resolve_output(config, command, out))
    logger.info(f"Report written to {path}")
    if csv:
        for table in export_csv(report, path.parent, path.stem):
            logger.info(f"CSV written to {table}")

    failed = report.failed_checks()
    for check in failed:
        logger.warning(f"FAIL {check.name}: expected {check.expected}, observed {check.observed}")
    status = "PASS" if report.passed else "FAIL"
    click.echo(
        f"{command.value}: {status} ({len(report.checks) - len(failed)}/{len(report.checks)}"
        f" checks) -> {path}"
    )
    sys.exit(EXIT_PASS if report.passed else EXIT_FAIL)


@click.group()
@click.option("--log-level", default="WARNING", show_default=True, help="Logging level.")
def cli(log_level: str) -> None:
    """Verification toolkit for hyperbolic models, weights and polyhomogeneous expansions."""
    load_dotenv()
    configure_logging(log_level)


@cli.command("verify-metric")
@run_options
def verify_metric(
    config_path: Optional[str], seed: Optional[int], out: Optional[str], csv: bool
) -> None:
    """Chart isometries and curvature range."""
    execute(CommandName.VERIFY_METRIC, config_path, seed, out, csv)


@cli.command("curvature-report")
@run_options
def curvature_report(
    config_path: Optional[str], seed: Optional[int], out: Optional[str], csv: bool
) -> None:
    """Curvature tensors, Einstein constant and the equidistant foliation."""
    execute(CommandName.CURVATURE_REPORT, config_path, seed, out, csv)


@cli.command("weight-scan")
@run_options
@click.option("--grid", is_flag=True, help="Also certify every weight of the admissible grid.")
def weight_scan(
    config_path: Optional[str], seed: Optional[int], out: Optional[str], csv: bool, grid: bool
) -> None:
    """Positivity certificate for a double weight."""
    execute(CommandName.WEIGHT_SCAN, config_path, seed, out, csv, grid)


@cli.command("indicial")
@run_options
def indicial(
    config_path: Optional[str], seed: Optional[int], out: Optional[str], csv: bool
) -> None:
    """Critical weights, Dirichlet interval and ladder."""
    execute(CommandName.INDICIAL, config_path, seed, out, csv)


@cli.command("monoid")
@run_options
def monoid(
    config_path: Optional[str], seed: Optional[int], out: Optional[str], csv: bool
) -> None:
    """Elements of N_L up to the configured bound."""
    execute(CommandName.MONOID, config_path, seed, out, csv)


@cli.command("phg-run")
@run_options
def phg_run(
    config_path: Optional[str], seed: Optional[int], out: Optional[str], csv: bool
) -> None:
    """Polyhomogeneous iteration for a radial model problem."""
    execute(CommandName.PHG_RUN, config_path, seed, out, csv)


if __name__ == "__main__":
    cli()
