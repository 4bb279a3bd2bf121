"""
Verification commands
Harnack scans, sharpness search and the nested-box probe
"""

import logging

import click
import pandas as pd
from rich.table import Table

from modules.conditions import ToleranceProfile
from modules.pde import solve, solve_drift
from modules.verify import (
    characteristic_cases,
    differential_harnack,
    harnack_scan,
    nested_domain_probe,
    sharpness_locate,
)
from modules.verify.differential import GRID_PROFILE

from cli.models import RunMode
from cli.utils import builders
from .common import EXIT_FAILURE, console, exporter, handle_errors, load_run, parse_point, print_reports, run_options

logger = logging.getLogger(__name__)


def _differential_profile(config, kernel_mode: bool):
    """Configured violation threshold with the equality band of the subject kind"""
    threshold = config.tolerances.differential
    if threshold is None:
        return None
    equality = 1e-8 if kernel_mode else GRID_PROFILE.equality
    return ToleranceProfile(violation=threshold, equality=equality)


def _sharpness_table(points) -> pd.DataFrame:
    return pd.DataFrame([{
        'x': p.x, 't': p.t, 's': p.s, 'y_star': p.y_star, 'ratio': p.ratio,
        'characteristic_y': p.characteristic_y, 'characteristic_error': p.characteristic_error,
        'at_bound': p.at_bound, 'on_characteristic': p.on_characteristic, 'is_equality': p.is_equality,
    } for p in points])


@click.command()
@run_options
@click.option('--potential', default=None, help='Override the potential expression')
@click.option('--tolerance', type=float, default=None, help='Override the Harnack tolerance')
@handle_errors
def verify(config_path, out_dir, jobs, seed, potential, tolerance):
    """Harnack scan (kernel or PDE mode) plus the differential bound; exit 1 unless the scan passes"""
    config, seed, jobs = load_run(config_path, seed, jobs, potential=potential)
    tolerance = config.tolerances.harnack if tolerance is None else tolerance
    provider = builders.omega_provider(config, jobs)
    rate_pair, comparison = builders.rate_pair(config)
    f = builders.drift(config)
    sampler = builders.scan_sampler(config)
    kernel_mode = config.mode == RunMode.KERNEL

    sharpness = []
    if kernel_mode:
        subject = builders.kernel_spec(config)
        report = harnack_scan(subject, rate_pair, provider, sampler, tolerance=tolerance, drift=f,
                              extents=config.box.extents, jobs=jobs)
        if f is None and config.sampler.sharpness_cases:
            cases = [(x, t, s) for x, _, t, s in characteristic_cases(subject, config.sampler.sharpness_cases, seed)]
            sharpness = sharpness_locate(subject, rate_pair, provider, cases)
    else:
        grid = builders.grid(config)
        V = builders.potential(config)
        u0 = builders.initial_data(config)
        scheme = config.solver.scheme
        subject = solve_drift(f, V, u0, grid, scheme) if f is not None else solve(V, u0, grid, scheme)
        report = harnack_scan(subject, rate_pair, provider, sampler, tolerance=tolerance, drift=f, jobs=jobs)
    differential = differential_harnack(subject, rate_pair, drift=f,
                                        profile=_differential_profile(config, kernel_mode))

    out = exporter(out_dir)
    out.export_table(report.to_frame(), 'harnack')
    if sharpness:
        out.export_table(_sharpness_table(sharpness), 'sharpness')
    payload = {
        'mode': config.mode.value,
        'harnack': report.to_dict(),
        'scan_config': report.config,
        'differential': differential.to_dict(),
        'sharpness': [p.to_dict() for p in sharpness],
    }
    if comparison is not None:
        payload['comparison'] = comparison.report.to_dict()
    path = out.export_report(payload, 'verify', config.model_dump(mode='json'), seed)

    table = Table(title=f"{config.name}: harnack scan ({rate_pair.name}, omega {provider.name}, seed {seed})")
    for column in ('verdict', 'min ratio', 'quadruples', 'violations', 'skipped', 'triaged', 'config hash'):
        table.add_column(column)
    colour = 'green' if report.passed else 'red'
    table.add_row(f"[{colour}]{report.verdict.value}[/{colour}]", f"{report.min_ratio!r}",
                  str(report.quadruple_count), str(len(report.violations)), str(report.skipped_count),
                  str(report.triaged_count), report.config_hash[:12])
    console.print(table)
    reports = [differential] + ([comparison.report] if comparison is not None else [])
    print_reports(reports, 'differential harnack')
    for point in sharpness:
        console.print(f"sharpness x={point.x} t={point.t} s={point.s}: y*={point.y_star} ratio={point.ratio!r}")
    console.print(f"wrote {path}")

    if not report.passed:
        click.get_current_context().exit(EXIT_FAILURE)


@click.command()
@run_options
@click.option('--point', 'points', multiple=True, help='x,t,s (flattened coordinates); repeatable')
@click.option('--cases', type=click.IntRange(min=1), default=None,
              help='Number of seeded cases when no --point is given')
@handle_errors
def sharpness(config_path, out_dir, jobs, seed, points, cases):
    """Equality search along the characteristic direction; exit 1 unless every minimiser is sharp"""
    config, seed, jobs = load_run(config_path, seed, jobs)
    if config.mode != RunMode.KERNEL:
        raise click.UsageError("sharpness needs a kernel-mode config")
    kernel = builders.kernel_spec(config)
    provider = builders.omega_provider(config, jobs)
    rate_pair, _ = builders.rate_pair(config)
    if points:
        triples = []
        for text in points:
            values = parse_point(text)
            if len(values) != config.dim + 2:
                raise click.BadParameter(f"expected {config.dim + 2} numbers, got {text!r}", param_hint='--point')
            triples.append((values[:config.dim], values[config.dim], values[config.dim + 1]))
    else:
        count = cases or config.sampler.sharpness_cases or 5
        triples = [(x, t, s) for x, _, t, s in characteristic_cases(kernel, count, seed)]
    located = sharpness_locate(kernel, rate_pair, provider, triples)

    out = exporter(out_dir)
    path = out.export_table(_sharpness_table(located), 'sharpness')
    out.export_report({'sharpness': [p.to_dict() for p in located]}, 'sharpness',
                      config.model_dump(mode='json'), seed)
    table = Table(title=f"sharpness ({kernel.kind.value}, {rate_pair.name})")
    for column in ('x', 't', 's', 'y*', 'characteristic y', 'ratio', 'sharp'):
        table.add_column(column)
    for p in located:
        sharp = p.on_characteristic and p.is_equality and not p.at_bound
        table.add_row(str(p.x), f"{p.t:g}", f"{p.s:g}", str(p.y_star), str(p.characteristic_y),
                      f"{p.ratio!r}", '[green]yes[/green]' if sharp else '[red]no[/red]')
    console.print(table)
    console.print(f"wrote {path}")
    if not all(p.on_characteristic and p.is_equality and not p.at_bound for p in located):
        click.get_current_context().exit(EXIT_FAILURE)


@click.command()
@run_options
@handle_errors
def nested(config_path, out_dir, jobs, seed):
    """Harnack scans on growing boxes; exit 1 unless every box passes"""
    config, seed, jobs = load_run(config_path, seed, jobs)
    if config.mode != RunMode.PDE:
        raise click.UsageError("nested needs a pde-mode config")
    settings = config.nested
    rate_pair, _ = builders.rate_pair(config)
    quadruples = builders.nested_quadruples(config)
    table = nested_domain_probe(
        builders.potential(config), builders.initial_data(config), settings.half_widths, quadruples,
        rate_pair, builders.omega_provider(config, jobs), spacing=settings.spacing, dt=config.solver.dt,
        snapshot_times=sorted(set(config.solver.snapshot_times) | {config.solver.t_end}),
        probe_radius=settings.probe_radius, tolerance=config.tolerances.harnack, jobs=jobs)

    out = exporter(out_dir)
    path = out.export_table(table, 'nested')
    out.export_report({'boxes': table.to_dict(orient='records')}, 'nested', config.model_dump(mode='json'), seed)
    rich_table = Table(title=f"{config.name}: nested boxes")
    for column in table.columns:
        rich_table.add_column(column)
    for row in table.itertuples(index=False):
        rich_table.add_row(*[f"{v!r}" if isinstance(v, float) else str(v) for v in row])
    console.print(rich_table)
    console.print(f"wrote {path}")
    if not (table['verdict'] == 'pass').all():
        click.get_current_context().exit(EXIT_FAILURE)
