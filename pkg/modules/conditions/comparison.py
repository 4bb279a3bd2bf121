"""
Comparison Selection
====================
Pick a rate pair for a potential by comparing its Laplacian with that of a
quadratic reference potential: sup Lap V1 <= 2 d C^2 lets V1 borrow the
sinh pair of C^2 |x|^2.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from modules.closedform import RatePair, rate_pair_quadratic
from modules.expr import PotentialExpr, ScalarField, box_sample_points, differentiate

from .report import ANALYTIC, ConditionId, ConditionReport, Verdict, summarize

logger = logging.getLogger(__name__)

C_GRID_EXPONENTS = range(-80, 81)
MAX_GRID_POINTS = 200_000
UNBOUNDED_LAPLACIAN = 1e12


def c_grid() -> np.ndarray:
    """Logarithmic grid 2^(k/8), k = -80..80"""
    return np.array([2.0 ** (k / 8.0) for k in C_GRID_EXPONENTS])


@dataclass
class ComparisonResult:
    """Selected reference constant and its certificate"""
    rate_pair: Optional[RatePair]
    C: Optional[float]
    sup_laplacian: float
    report: ConditionReport


def sup_laplacian(field: ScalarField, extents: Sequence[Tuple[float, float]],
                  points_per_axis: int = 201) -> Tuple[float, np.ndarray]:
    """
    Sampled supremum of Lap V over the box, polished by a bounded local search
    from the best grid point.

    Returns:
        (supremum, location)
    """
    dim = len(extents)
    cap = int(np.floor(MAX_GRID_POINTS ** (1.0 / dim)))
    if points_per_axis > cap:
        logger.info(f"capping comparison grid at {cap} points per axis for d={dim}")
        points_per_axis = cap
    points = box_sample_points(extents, points_per_axis)
    values = field.laplacian(points)
    if not np.all(np.isfinite(values)):
        return float('inf'), points[int(np.argmax(np.where(np.isfinite(values), -np.inf, 1.0)))]

    index = int(np.argmax(values))
    best, location = float(values[index]), points[index]
    polished = minimize(lambda p: -float(field.laplacian(p)), location, method='L-BFGS-B',
                        bounds=list(extents))
    if polished.success and -polished.fun > best:
        best, location = float(-polished.fun), np.asarray(polished.x)
    return best, location


def comparison_select(V1: PotentialExpr, extents: Sequence[Tuple[float, float]],
                      family: str = 'quadratic', points_per_axis: int = 201) -> ComparisonResult:
    """
    Smallest grid constant C with sup Lap V1 <= 2 d C^2 over the box.

    Args:
        V1: Potential to certify
        extents: Per-axis (lo, hi) of the box
        family: Reference family; only 'quadratic' (V2 = C^2 |x|^2)
        points_per_axis: Sampling resolution for the supremum

    Returns:
        ComparisonResult with rate_pair_quadratic(d, C) and a
        comparison_certificate report (residual 2 d C^2 - sup Lap V1)
    """
    if family != 'quadratic':
        raise ValueError(f"unsupported comparison family {family!r}")
    if len(extents) != V1.dim:
        raise ValueError(f"box has {len(extents)} axes, potential has dimension {V1.dim}")
    dim = V1.dim
    field = differentiate(V1)
    sup, location = sup_laplacian(field, extents, points_per_axis)
    point = tuple(np.asarray(location).tolist())

    if not np.isfinite(sup) or sup > UNBOUNDED_LAPLACIAN:
        logger.warning(f"Laplacian of {V1} is unbounded above on the box (sup {sup})")
        report = ConditionReport(ConditionId.COMPARISON_CERTIFICATE, 1, float('nan'), point,
                                 Verdict.INCONCLUSIVE, ANALYTIC.violation, ANALYTIC.equality, 1,
                                 [f"sup Lap V = {sup!r} is unbounded on box samples"])
        return ComparisonResult(None, None, sup, report)

    grid = c_grid()
    admissible = grid[sup <= 2.0 * dim * grid ** 2]
    if admissible.size == 0:
        report = ConditionReport(ConditionId.COMPARISON_CERTIFICATE, 1, float('nan'), point,
                                 Verdict.INCONCLUSIVE, ANALYTIC.violation, ANALYTIC.equality, 1,
                                 [f"sup Lap V = {sup!r} exceeds the largest grid constant"])
        return ComparisonResult(None, None, sup, report)

    C = float(admissible[0])
    notes = [f"sup Lap V = {sup!r} at {list(point)}", f"C = {C!r}, 2dC^2 = {2.0 * dim * C * C!r}"]
    if sup <= 0:
        notes.append("Lap V <= 0: the heat pair A(t) = t, beta(t) = t^(d/2) is the C -> 0 limit")
    uncertified = None if V1.is_c2 else "potential is not C2; Lap V is not certified"
    report = summarize(ConditionId.COMPARISON_CERTIFICATE, [2.0 * dim * C * C - sup], [point], ANALYTIC,
                       allow_equality=False, uncertified=uncertified, notes=notes)
    logger.info(f"comparison selected C = {C!r} for {V1}")
    return ComparisonResult(rate_pair_quadratic(dim, C), C, sup, report)
