"""
Shared command plumbing: config loading, seed resolution, error mapping and
console tables
"""

import functools
import json
import logging
import os
from pathlib import Path
from typing import Callable, Iterable, Optional, Tuple

import click
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from modules.action import StencilSolveError, default_jobs
from modules.conditions import ConditionReport, Verdict
from modules.expr import DimensionMismatchError, ExpressionSyntaxError, NotRepresentableError
from modules.pde import NonPositiveSolutionError, SingularSystemError

from cli.models import RunConfig
from cli.utils.report_exporter import ReportExporter

logger = logging.getLogger(__name__)

console = Console()

SEED_VARIABLE = 'HARNACK_LAB_SEED'
EXIT_FAILURE = 1
EXIT_USAGE = 2

# ValueError last: invalid points, windows and parameters from the library
INPUT_ERRORS = (ExpressionSyntaxError, DimensionMismatchError, NotRepresentableError, ValidationError,
                json.JSONDecodeError, ValueError)
NUMERICAL_ERRORS = (NonPositiveSolutionError, SingularSystemError, StencilSolveError)


def run_options(func: Callable) -> Callable:
    """--config, --out, --jobs and --seed for every subcommand"""
    options = [
        click.option('--config', 'config_path', required=True, type=click.Path(exists=True, dir_okay=False),
                     help='JSON run configuration'),
        click.option('--out', 'out_dir', default='output', show_default=True, type=click.Path(file_okay=False),
                     help='Output directory'),
        click.option('--jobs', type=click.IntRange(min=1), default=None,
                     help='Worker threads (default: logical cores)'),
        click.option('--seed', type=int, default=None, help=f'Sampler seed (overrides {SEED_VARIABLE})'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def resolve_seed(config: RunConfig, seed: Optional[int]) -> int:
    """Flag, then environment, then config"""
    if seed is not None:
        return seed
    value = os.environ.get(SEED_VARIABLE)
    if value:
        try:
            return int(value)
        except ValueError:
            raise click.BadParameter(f"{SEED_VARIABLE}={value!r} is not an integer")
    return config.sampler.seed


def load_run(config_path: str, seed: Optional[int], jobs: Optional[int],
             **overrides) -> Tuple[RunConfig, int, int]:
    """
    Load the config, apply flag overrides and the effective seed

    Args:
        config_path: JSON file
        seed: --seed flag
        jobs: --jobs flag
        overrides: Top-level config keys set by flags (None leaves the key alone)

    Returns:
        (config, seed, jobs)
    """
    config = RunConfig.from_file(Path(config_path), overrides)
    effective = resolve_seed(config, seed)
    if effective != config.sampler.seed:
        config = config.model_copy(update={'sampler': config.sampler.model_copy(update={'seed': effective})})
    logger.info(f"loaded {config.name} from {config_path} (seed {effective})")
    return config, effective, jobs or default_jobs()


def exporter(out_dir: str) -> ReportExporter:
    return ReportExporter(Path(out_dir))


def handle_errors(func: Callable) -> Callable:
    """Map input errors to exit 2 and numerical failures to exit 1"""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return func(*args, **kwargs)
        except INPUT_ERRORS as exc:
            console.print(f"[red]configuration error:[/red] {exc}")
            ctx.exit(EXIT_USAGE)
        except NUMERICAL_ERRORS as exc:
            console.print(f"[red]numerical failure:[/red] {exc}")
            ctx.exit(EXIT_FAILURE)
    return wrapper


def parse_point(text: str) -> list:
    """Comma separated numbers"""
    try:
        return [float(v) for v in text.split(',')]
    except ValueError:
        raise click.BadParameter(f"expected comma separated numbers, got {text!r}")


def print_reports(reports: Iterable[ConditionReport], title: str) -> None:
    table = Table(title=title)
    table.add_column('condition')
    table.add_column('verdict')
    table.add_column('worst residual', justify='right')
    table.add_column('samples', justify='right')
    table.add_column('notes')
    colours = {Verdict.VIOLATED: 'red', Verdict.INCONCLUSIVE: 'yellow'}
    for report in reports:
        colour = colours.get(report.verdict, 'green')
        table.add_row(report.condition_id.value, f"[{colour}]{report.verdict.value}[/{colour}]",
                      f"{report.worst_residual:.3e}", str(report.sample_count), '; '.join(report.notes))
    console.print(table)
