"""
Action commands
Omega tables and single geodesic paths
"""

import logging
from typing import List, Tuple

import click
import numpy as np
import pandas as pd
from rich.table import Table

from modules.action import TimeWindow, solve_geodesic
from modules.expr import differentiate

from cli.utils import builders
from .common import EXIT_FAILURE, console, exporter, handle_errors, load_run, parse_point, run_options

logger = logging.getLogger(__name__)


def _columns(dim: int) -> Tuple[List[str], List[str]]:
    if dim == 1:
        return ['x'], ['y']
    return [f"x{i + 1}" for i in range(dim)], [f"y{i + 1}" for i in range(dim)]


@click.command()
@run_options
@click.option('--potential', default=None, help='Override the potential expression')
@click.option('--point', 'points', multiple=True, help='x,y,t,s (flattened coordinates); repeatable')
@handle_errors
def omega(config_path, out_dir, jobs, seed, potential, points):
    """Omega at the configured points, written to omega.csv"""
    config, seed, jobs = load_run(config_path, seed, jobs, potential=potential)
    rows = [parse_point(p) for p in points] or config.points
    if not rows:
        raise click.UsageError("no points: give --point or a points list in the config")
    field = differentiate(builders.effective_potential(config))
    provider = builders.omega_provider(config, jobs)
    numeric = provider.name == 'numeric'
    opts = builders.solver_options(config)

    records = []
    failed = 0
    for values in rows:
        x, y, t, s = builders.split_point(values, config.dim)
        if numeric:
            result = solve_geodesic(y, x, TimeWindow(s=s, t=t), field, opts)
            value, residual, method = result.omega, result.residual, result.method.value
            if not result.converged:
                failed += 1
                value = float('nan')
        else:
            value, residual, method = provider.omega(x, y, t, s), 0.0, provider.name
        records.append([*x, *y, t, s, value, residual, method])

    x_names, y_names = _columns(config.dim)
    frame = pd.DataFrame(records, columns=x_names + y_names + ['t', 's', 'omega', 'residual', 'method'])
    path = exporter(out_dir).export_table(frame, 'omega')

    table = Table(title=f"omega ({provider.name}, seed {seed})")
    for column in frame.columns:
        table.add_column(column)
    for record in frame.itertuples(index=False):
        table.add_row(*[f"{v:.10g}" if isinstance(v, float) else str(v) for v in record])
    console.print(table)
    console.print(f"wrote {path}")
    if failed:
        console.print(f"[red]{failed} geodesic solve(s) did not converge[/red]")
        click.get_current_context().exit(EXIT_FAILURE)


@click.command()
@run_options
@click.option('--potential', default=None, help='Override the potential expression')
@click.option('--point', default=None, help='x,y,t,s (flattened coordinates); default the first config point')
@handle_errors
def geodesic(config_path, out_dir, jobs, seed, potential, point):
    """Geodesic path between y and x, written to geodesic.csv with omega in geodesic.json"""
    config, seed, jobs = load_run(config_path, seed, jobs, potential=potential)
    values = parse_point(point) if point else (config.points[0] if config.points else None)
    if values is None:
        raise click.UsageError("no point: give --point or a points list in the config")
    x, y, t, s = builders.split_point(values, config.dim)
    result = solve_geodesic(y, x, TimeWindow(s=s, t=t), differentiate(builders.effective_potential(config)),
                            builders.solver_options(config))

    nodes = result.path.nodes
    frame = pd.DataFrame(nodes, columns=[f"x{i + 1}" for i in range(config.dim)])
    frame.insert(0, 'u', np.linspace(0.0, 1.0, nodes.shape[0]))
    out = exporter(out_dir)
    path = out.export_table(frame, 'geodesic')
    out.export_report({
        'point': {'x': x.tolist(), 'y': y.tolist(), 't': t, 's': s},
        'omega': result.omega,
        'residual': result.residual,
        'status': result.status.value,
        'method': result.method.value,
        'converged': result.converged,
        'warnings': list(result.warnings),
    }, 'geodesic', config.model_dump(mode='json'), seed)

    console.print(f"omega = {result.omega!r}  residual = {result.residual:.3e}  "
                  f"status = {result.status.value}  method = {result.method.value}")
    for warning in result.warnings:
        console.print(f"[yellow]{warning}[/yellow]")
    console.print(f"wrote {path}")
    if not result.converged:
        click.get_current_context().exit(EXIT_FAILURE)
