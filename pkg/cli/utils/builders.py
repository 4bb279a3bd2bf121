"""
Builders turning a RunConfig into library objects
"""

import logging
from typing import List, Optional, Tuple

import numpy as np

from modules.action import SolverOptions
from modules.closedform import (
    KernelSpec,
    RatePair,
    drift_transform,
    rate_pair_heat,
    rate_pair_power,
    rate_pair_quadratic,
)
from modules.conditions import ComparisonResult, OmegaProvider, comparison_select, provider_for
from modules.expr import PotentialExpr, differentiate, parse
from modules.pde import BoxGrid, InitialData
from modules.verify import Quadruple, SamplerConfig as ScanSampler, make_quadruples

from cli.models import RatePairKind, RunConfig

logger = logging.getLogger(__name__)


def potential(config: RunConfig) -> PotentialExpr:
    return parse(config.potential, config.dim)


def drift(config: RunConfig) -> Optional[PotentialExpr]:
    return parse(config.drift, config.dim) if config.drift else None


def effective_potential(config: RunConfig) -> PotentialExpr:
    """Potential the action sees: V itself, or |grad f|^2 - Lap f + V when a drift f is set"""
    expr = potential(config)
    f = drift(config)
    return drift_transform(f, expr) if f is not None else expr


def solver_options(config: RunConfig) -> SolverOptions:
    settings = config.geodesic
    return SolverOptions(n=settings.n, tol=settings.tol, max_iter=settings.max_iter,
                         method=settings.method, refine=settings.refine, starts=settings.starts,
                         seed=config.sampler.seed)


def omega_provider(config: RunConfig, jobs: int = 1) -> OmegaProvider:
    """Provider for the configured omega source; numeric omega uses the drift's effective potential"""
    quadratic = config.quadratic
    V = None
    if config.omega_source.value == 'numeric':
        V = differentiate(effective_potential(config))
    return provider_for(
        config.omega_source.value,
        config.dim,
        V=V,
        C1=quadratic.C1 if quadratic else None,
        C2=quadratic.C2 if quadratic else 0.0,
        a=quadratic.a if quadratic else None,
        opts=solver_options(config),
        jobs=jobs,
    )


def rate_pair(config: RunConfig) -> Tuple[RatePair, Optional[ComparisonResult]]:
    """
    Configured rate pair; comparison_auto selects the quadratic pair whose
    constant bounds the Laplacian of the potential over the box

    Raises:
        ValueError: comparison_auto found no admissible constant
    """
    settings = config.rate_pair
    if settings.kind == RatePairKind.HEAT:
        return rate_pair_heat(config.dim), None
    if settings.kind == RatePairKind.QUADRATIC:
        return rate_pair_quadratic(config.dim, settings.C), None
    if settings.kind == RatePairKind.POWER:
        return rate_pair_power(config.dim, settings.exponent), None
    comparison = comparison_select(potential(config), config.box.extents)
    if comparison.rate_pair is None:
        raise ValueError(f"comparison_auto found no constant for {config.potential}: "
                         f"{'; '.join(comparison.report.notes)}")
    return comparison.rate_pair, comparison


def kernel_spec(config: RunConfig) -> KernelSpec:
    settings = config.kernel
    return KernelSpec(settings.kind, d=config.dim, C1=settings.C1, C2=settings.C2,
                      a=tuple(settings.a) if settings.a else None)


def grid(config: RunConfig, extents: Optional[List[Tuple[float, float]]] = None) -> BoxGrid:
    settings = config.solver
    return BoxGrid.uniform(extents or config.box.extents, settings.nx, settings.dt, settings.t_end,
                           settings.snapshot_times)


def initial_data(config: RunConfig) -> InitialData:
    settings = config.initial
    if settings.kind == 'gaussian':
        return InitialData.gaussian(settings.center or [0.0] * config.dim, settings.width)
    if settings.kind == 'mehler_snapshot':
        return InitialData.mehler_snapshot(settings.t0, settings.C1)
    if settings.kind == 'constant':
        return InitialData.constant(settings.value)
    return InitialData.expression(settings.text)


def scan_sampler(config: RunConfig) -> ScanSampler:
    settings = config.sampler
    return ScanSampler(count=settings.count, seed=settings.seed, margin_cells=settings.margin_cells,
                       delta_fraction=settings.delta_fraction, far_fraction=settings.far_fraction,
                       t_range=tuple(settings.t_range))


def split_point(values: List[float], dim: int) -> Tuple[np.ndarray, np.ndarray, float, float]:
    """Flat x, y, t, s list to arrays"""
    if len(values) != 2 * dim + 2:
        raise ValueError(f"a point needs {2 * dim + 2} numbers (x, y, t, s), got {len(values)}")
    x = np.array(values[:dim], dtype=float)
    y = np.array(values[dim:2 * dim], dtype=float)
    return x, y, float(values[2 * dim]), float(values[2 * dim + 1])


def nested_quadruples(config: RunConfig) -> List[Quadruple]:
    """
    Seeded node-aligned quadruples inside half the smallest nested box, with
    times drawn from the snapshot times
    """
    settings = config.nested
    times = sorted(set(config.solver.snapshot_times) | {config.solver.t_end})
    if len(times) < 2:
        raise ValueError("nested probe needs at least two output times")
    pairs = [(t, s) for i, t in enumerate(times) for s in times[:i]]
    reach = 0.5 * settings.half_widths[0]
    rng = np.random.default_rng(config.sampler.seed)
    points = []
    for _ in range(settings.quadruple_count):
        x = np.round(rng.uniform(-reach, reach, size=config.dim) / settings.spacing) * settings.spacing
        y = np.round(rng.uniform(-reach, reach, size=config.dim) / settings.spacing) * settings.spacing
        t, s = pairs[int(rng.integers(len(pairs)))]
        points.append((x, y, t, s))
    return make_quadruples(points)
