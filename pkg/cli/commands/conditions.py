"""
Condition command
Sampled certification of the Harnack hypotheses for one configuration
"""

import logging
from typing import List

import click
import numpy as np
import pandas as pd

from modules.action import TimeWindow, parallel_map, solve_geodesic
from modules.conditions import (
    ConditionReport,
    build_sample_set,
    check_beta_boundary_limits,
    check_boundary_normal,
    check_first_order,
    check_lemma_2_4,
    check_second_order,
    check_second_order_integral,
    check_v_convex_ball,
)
from modules.expr import differentiate, estimate_lower_bound_shift
from modules.verify import box_radius

from cli.utils import builders
from .common import EXIT_FAILURE, console, exporter, handle_errors, load_run, print_reports, run_options

logger = logging.getLogger(__name__)

GROUPS = ('first_order', 'second_order', 'integral', 'lemma', 'convexity', 'boundary', 'limits', 'comparison')
INTEGRAL_GEODESICS = 4


@click.command()
@run_options
@click.option('--potential', default=None, help='Override the potential expression')
@click.option('--only', default=None, help=f"Comma separated subset of {', '.join(GROUPS)}")
@handle_errors
def check(config_path, out_dir, jobs, seed, potential, only):
    """Condition reports; exit 1 when any verdict is violated"""
    config, seed, jobs = load_run(config_path, seed, jobs, potential=potential)
    groups = GROUPS if not only else tuple(g.strip() for g in only.split(','))
    unknown = set(groups) - set(GROUPS)
    if unknown:
        raise click.BadParameter(f"unknown condition groups {sorted(unknown)}", param_hint='--only')

    expr = estimate_lower_bound_shift(builders.effective_potential(config), config.box.extents)
    field = differentiate(expr)
    provider = builders.omega_provider(config, jobs)
    rate_pair, comparison = builders.rate_pair(config)
    opts = builders.solver_options(config)
    samples = build_sample_set(config.box.extents, config.sampler.points_per_axis,
                               max_samples=config.sampler.max_samples, seed=seed)

    reports: List[ConditionReport] = []
    if 'first_order' in groups:
        reports.extend(check_first_order(provider, field, samples, jobs=jobs))
    if 'second_order' in groups:
        reports.append(check_second_order(provider, rate_pair, samples, jobs=jobs))

    if 'integral' in groups or 'lemma' in groups:
        chosen = list(samples)[:INTEGRAL_GEODESICS]
        geodesics = parallel_map(
            lambda sample: solve_geodesic(sample.y, sample.x, TimeWindow(s=sample.s, t=sample.t), field, opts),
            chosen, jobs)
        if 'integral' in groups:
            reports.append(check_second_order_integral(field, rate_pair, geodesics))
        if 'lemma' in groups and chosen:
            derivatives = parallel_map(
                lambda sample: provider.derivatives(sample.x, sample.y, sample.t, sample.s, order=2),
                chosen, jobs)
            reports.append(check_lemma_2_4(field, rate_pair, geodesics, derivatives))

    extents = config.box.extents
    if config.ball is not None:
        center, radius = np.array(config.ball.center), config.ball.radius
    else:
        center, radius = np.array([0.5 * (lo + hi) for lo, hi in extents]), box_radius(extents)
    if 'convexity' in groups:
        reports.append(check_v_convex_ball(field, center, radius, seed=seed))
    if 'boundary' in groups:
        t_mid = 0.5 * (config.sampler.t_range[0] + config.sampler.t_range[1])
        window = TimeWindow(s=0.5 * t_mid, t=t_mid)
        reports.append(check_boundary_normal(field, center, radius, window, [center], opts,
                                             boundary_samples=8, seed=seed, jobs=jobs))
    if 'limits' in groups:
        offset = np.zeros(config.dim)
        offset[0] = 0.5 * radius
        pairs = [(center, center), (center + offset, center)]
        reports.append(check_beta_boundary_limits(rate_pair, provider, pairs, alpha=expr.lower_bound_shift))
    if 'comparison' in groups and comparison is not None:
        reports.append(comparison.report)

    print_reports(reports, f"{config.name}: rate pair {rate_pair.name}, omega {provider.name}")
    out = exporter(out_dir)
    table = pd.DataFrame([{
        'condition': r.condition_id.value,
        'verdict': r.verdict.value,
        'worst_residual': r.worst_residual,
        'sample_count': r.sample_count,
        'inconclusive_count': r.inconclusive_count,
    } for r in reports])
    out.export_table(table, 'conditions')
    path = out.export_report({
        'rate_pair': rate_pair.name,
        'omega_source': provider.name,
        'lower_bound_shift': expr.lower_bound_shift,
        'reports': [r.to_dict() for r in reports],
    }, 'conditions', config.model_dump(mode='json'), seed)
    console.print(f"wrote {path}")

    if any(r.violated for r in reports):
        click.get_current_context().exit(EXIT_FAILURE)
