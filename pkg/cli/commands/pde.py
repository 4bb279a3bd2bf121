"""
PDE command
Neumann box solve with snapshot export
"""

import logging

import click
import numpy as np

from modules.pde import neumann_flux, solve, solve_drift, stability_probe

from cli.models import RunMode
from cli.utils import builders
from .common import console, exporter, handle_errors, load_run, run_options

logger = logging.getLogger(__name__)


@click.command(name='solve')
@run_options
@click.option('--potential', default=None, help='Override the potential expression')
@handle_errors
def solve_command(config_path, out_dir, jobs, seed, potential):
    """Solve du/dt = Laplacian u - V u (or the drift form) and export snapshots.csv"""
    config, seed, jobs = load_run(config_path, seed, jobs, potential=potential)
    if config.mode != RunMode.PDE:
        raise click.UsageError("solve needs a pde-mode config")
    grid = builders.grid(config)
    V = builders.potential(config)
    suggested = stability_probe(grid, V)
    if grid.dt > suggested:
        console.print(f"[yellow]dt={grid.dt} exceeds the suggested {suggested:.3e}[/yellow]")

    f = builders.drift(config)
    scheme = config.solver.scheme
    if f is not None:
        solution = solve_drift(f, V, builders.initial_data(config), grid, scheme=scheme)
    else:
        solution = solve(V, builders.initial_data(config), grid, scheme=scheme)

    out = exporter(out_dir)
    path = out.export_table(solution.to_frame(), 'snapshots')
    flux = {t: float(np.max(np.abs(values))) for t, values in neumann_flux(solution).items()}
    report = out.export_report({
        'scheme': solution.scheme.value,
        'steps': solution.steps,
        'min_value': solution.min_value,
        'times': solution.times,
        'max_boundary_flux': [[t, value] for t, value in flux.items()],
        'suggested_dt': suggested,
        'warnings': solution.warnings,
    }, 'solve', config.model_dump(mode='json'), seed)

    console.print(f"{solution.scheme.value}: {solution.steps} steps, min value {solution.min_value:.6e}")
    for t, value in flux.items():
        console.print(f"  t={t!r}: max |boundary flux| {value:.3e}")
    console.print(f"wrote {path} and {report}")
