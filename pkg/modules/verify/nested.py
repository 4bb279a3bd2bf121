"""
Nested Domain Probe
===================
Solves the same Neumann problem on growing boxes and tracks how the Harnack
scan and the solution on a fixed inner region settle as the box grows.
"""

import logging
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from modules.closedform import RatePair
from modules.conditions import OmegaProvider
from modules.expr import PotentialExpr
from modules.pde import BoxGrid, InitialData, solve

from .harnack import harnack_scan
from .sampler import Quadruple

logger = logging.getLogger(__name__)


def _probe_points(dim: int, radius: float, spacing: float) -> np.ndarray:
    count = int(round(radius / spacing))
    axis = spacing * np.arange(-count, count + 1)
    mesh = np.meshgrid(*([axis] * dim), indexing='ij')
    return np.stack([m.ravel() for m in mesh], axis=-1)


def nested_domain_probe(V: PotentialExpr, u0: InitialData, half_widths: Sequence[float],
                        quadruples: Sequence[Quadruple], rate_pair: RatePair, provider: OmegaProvider,
                        spacing: float = 0.05, dt: float = 1e-3,
                        snapshot_times: Sequence[float] = (0.2, 0.5, 1.0), probe_radius: float = 2.0,
                        tolerance: float = 2e-3, jobs: int = 1) -> pd.DataFrame:
    """
    Harnack scans on boxes [-w, w]^d of increasing half width w.

    Args:
        V: Potential
        u0: Initial data
        half_widths: Strictly increasing box half widths
        quadruples: Fixed quadruples inside the smallest box
        rate_pair: (A, beta) pair
        provider: omega source
        spacing: Node spacing shared by every box
        dt: Time step
        snapshot_times: Output times; the quadruple times must be among them
        probe_radius: Solutions are compared on |x_i| <= probe_radius
        tolerance: Harnack scan tolerance
        jobs: Workers for omega evaluation

    Returns:
        One row per box: half_width, nx, min_ratio, verdict, sup_difference
        (sup over probe points and snapshot times of the change from the
        previous box; NaN for the first)
    """
    widths = [float(w) for w in half_widths]
    if not widths or any(b <= a for a, b in zip(widths, widths[1:])):
        raise ValueError("half widths must be a non-empty increasing list")
    smallest = widths[0]
    if probe_radius >= smallest:
        raise ValueError(f"probe radius {probe_radius} must lie inside the smallest box")
    for q in quadruples:
        if np.max(np.abs(np.concatenate([q.x, q.y]))) >= smallest:
            raise ValueError(f"quadruple {q.as_tuple()} is not inside the smallest box")

    dim = V.dim
    times = tuple(sorted(snapshot_times))
    probes = _probe_points(dim, probe_radius, spacing)
    rows: List[dict] = []
    previous: Optional[List[np.ndarray]] = None
    for width in widths:
        nx = int(round(2.0 * width / spacing)) + 1
        grid = BoxGrid.uniform([(-width, width)] * dim, nx, dt, times[-1], times)
        solution = solve(V, u0, grid)
        report = harnack_scan(solution, rate_pair, provider, quadruples=quadruples,
                              tolerance=tolerance, jobs=jobs)
        values = [solution.interpolate(probes, t) for t in times]
        difference = float('nan')
        if previous is not None:
            difference = max(float(np.max(np.abs(a - b))) for a, b in zip(values, previous))
        previous = values
        rows.append({
            'half_width': width,
            'nx': nx,
            'min_ratio': report.min_ratio,
            'verdict': report.verdict.value,
            'sup_difference': difference,
        })
        logger.info(f"box half width {width}: min ratio {report.min_ratio!r}, change {difference!r}")
    return pd.DataFrame(rows)
