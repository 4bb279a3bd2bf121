"""
Differential Harnack
====================
Pointwise bound Laplacian(log u) >= -beta'/beta(t), and for drift solutions
Laplacian(log u) >= Laplacian f - beta'/beta(t).
"""

import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from modules.closedform import KernelSpec, RatePair
from modules.conditions import ANALYTIC, ConditionId, ConditionReport, ToleranceProfile, summarize
from modules.expr import PotentialExpr, differentiate
from modules.pde import GridSolution

logger = logging.getLogger(__name__)

GRID_PROFILE = ToleranceProfile(violation=1e-3, equality=1e-4, scaled=False)
DEFAULT_TIMES = (0.1, 0.5, 1.0, 2.0)


def _drift_laplacian(drift: Optional[PotentialExpr], points: np.ndarray) -> np.ndarray:
    if drift is None:
        return np.zeros(points.shape[0])
    return differentiate(drift).laplacian(points)


def _kernel_residuals(kernel: KernelSpec, rate_pair: RatePair, samples: Sequence[Tuple],
                      drift: Optional[PotentialExpr]):
    points = np.array([np.atleast_1d(np.asarray(x, dtype=float)) for x, _ in samples])
    times = np.array([float(t) for _, t in samples])
    lap_log = np.asarray(kernel.log_laplacian(points, times), dtype=float)
    residuals = lap_log + rate_pair.beta_log_deriv(times) - _drift_laplacian(drift, points)
    return residuals, [(p.tolist(), t) for p, t in zip(points, times)]


def log_laplacian_grid(snapshot: np.ndarray, spacing: Sequence[float]) -> np.ndarray:
    """Second differences of log u on the nodes one cell in from every face"""
    log_u = np.log(snapshot)
    dim = len(spacing)
    total = np.zeros(tuple(n - 2 for n in snapshot.shape))
    for axis, h in enumerate(spacing):
        moved = np.moveaxis(log_u, axis, 0)
        second = np.moveaxis((moved[2:] - 2.0 * moved[1:-1] + moved[:-2]) / (h * h), 0, axis)
        total += second[tuple(slice(None) if k == axis else slice(1, -1) for k in range(dim))]
    return total


def _grid_residuals(solution: GridSolution, rate_pair: RatePair, drift: Optional[PotentialExpr],
                    t_min: float, margin: int):
    grid = solution.grid
    mask = grid.interior_mask(max(margin, 1))[tuple(slice(1, -1) for _ in range(grid.d))]
    nodes = grid.nodes().reshape(grid.shape + (grid.d,))[tuple(slice(1, -1) for _ in range(grid.d))]
    points = nodes[mask]
    drift_lap = _drift_laplacian(drift, points)

    residuals: List[float] = []
    labels: List[Tuple] = []
    for t in solution.times:
        if t < t_min:
            continue
        lap_log = log_laplacian_grid(solution.snapshots[t], grid.spacing)[mask]
        residuals.extend((lap_log + rate_pair.beta_log_deriv(t) - drift_lap).tolist())
        labels.extend((p.tolist(), t) for p in points)
    return np.array(residuals), labels


def differential_harnack(subject: Union[GridSolution, KernelSpec], rate_pair: RatePair,
                         samples: Optional[Sequence[Tuple]] = None, drift: Optional[PotentialExpr] = None,
                         t_min: float = 0.1, margin: int = 2,
                         profile: Optional[ToleranceProfile] = None) -> ConditionReport:
    """
    Residual Laplacian(log u) + beta'/beta(t) - Laplacian f per sample.

    Args:
        subject: Closed-form kernel (analytic log-Laplacian) or grid solution
            (second differences)
        rate_pair: (A, beta) pair
        samples: (x, t) pairs for kernels; default a 9-point grid on [-3, 3]^d
            at t in (0.1, 0.5, 1, 2). Grids use every interior node.
        drift: Drift potential f when u solves the drift equation
        t_min: Grid snapshots before t_min are skipped
        margin: Grid nodes within margin cells of a face are skipped
        profile: Tolerances (analytic for kernels, 1e-3 for grids by default)

    Returns:
        ConditionReport with condition id differential_harnack
    """
    if isinstance(subject, KernelSpec):
        if samples is None:
            axis = np.linspace(-3.0, 3.0, 9)
            mesh = np.meshgrid(*([axis] * subject.d), indexing='ij')
            nodes = np.stack([m.ravel() for m in mesh], axis=-1)
            samples = [(node, t) for t in DEFAULT_TIMES for node in nodes]
        residuals, labels = _kernel_residuals(subject, rate_pair, samples, drift)
        profile = profile or ANALYTIC
        allow_equality = True
    else:
        residuals, labels = _grid_residuals(subject, rate_pair, drift, t_min, margin)
        if residuals.size == 0:
            raise ValueError(f"no snapshots at or after t_min={t_min}")
        profile = profile or GRID_PROFILE
        allow_equality = False

    notes = [f"rate pair {rate_pair.name}"]
    if drift is not None:
        notes.append(f"drift f = {drift}")
    logger.info(f"differential harnack over {len(labels)} samples")
    return summarize(ConditionId.DIFFERENTIAL_HARNACK, residuals, labels, profile,
                     allow_equality=allow_equality, notes=notes)
