"""
Ball Geometry Checks
====================
V-convexity of Euclidean balls and the boundary condition on omega,
checked through the endpoint velocity of geodesics ending on the sphere.
"""

import logging
from typing import Optional, Sequence

import numpy as np

from modules.action import SolverOptions, TimeWindow, as_point, geodesic_velocity, parallel_map, solve_geodesic
from modules.expr import ScalarField

from .report import ANALYTIC, NUMERIC, ConditionId, ConditionReport, scaled_residual, summarize

logger = logging.getLogger(__name__)


def sphere_points(center: Sequence[float], radius: float, count: int = 64, seed: int = 0) -> np.ndarray:
    """
    Sample points on the sphere |x - center| = radius.

    d = 1 gives the two endpoints, d = 2 equally spaced angles, d >= 3 seeded
    normalised Gaussian directions.
    """
    center = as_point(center)
    dim = center.shape[0]
    if dim == 1:
        normals = np.array([[-1.0], [1.0]])
    elif dim == 2:
        angles = 2.0 * np.pi * np.arange(count) / count
        normals = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    else:
        rng = np.random.default_rng(seed)
        normals = rng.standard_normal((count, dim))
        normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    return center[None, :] + radius * normals


def check_v_convex_ball(V: ScalarField, center: Sequence[float], radius: float,
                        samples: int = 64, seed: int = 0) -> ConditionReport:
    """
    Minimum of grad V . nu over sampled boundary points of B_R(center).

    The sphere's curvature term |xi|^2 / R is strictly positive, so the
    condition holds whenever grad V . nu >= 0 at every sampled point.
    """
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    center = as_point(center, V.dim)
    points = sphere_points(center, radius, samples, seed)
    normals = (points - center[None, :]) / radius
    residuals = np.einsum('ij,ij->i', V.gradient(points), normals)
    uncertified = None if V.is_c2 else "potential is not C2"
    return summarize(ConditionId.V_CONVEX_BALL, residuals, [tuple(p.tolist()) for p in points], ANALYTIC,
                     allow_equality=False, uncertified=uncertified,
                     notes=[f"radius {radius!r}: curvature term 1/R = {1.0 / radius!r} > 0"])


def check_boundary_normal(V: ScalarField, center: Sequence[float], radius: float, window: TimeWindow,
                          interior: Sequence[Sequence[float]], opts: Optional[SolverOptions] = None,
                          boundary_samples: int = 16, seed: int = 0, jobs: int = 1) -> ConditionReport:
    """
    grad_x omega . nu >= 0 on the sphere via the endpoint identity
    grad_x omega = gamma'(1) / (2(t - s)).

    Geodesics run from each interior point y to each sampled boundary point x.
    Nodes leaving the closed ball are reported as a confinement note.
    """
    center = as_point(center, V.dim)
    opts = opts or SolverOptions()
    boundary = sphere_points(center, radius, boundary_samples, seed)
    pairs = [(as_point(y, V.dim), x) for y in interior for x in boundary]

    def evaluate(pair):
        y, x = pair
        try:
            return solve_geodesic(y, x, window, V, opts)
        except (ValueError, FloatingPointError) as exc:
            logger.warning(f"boundary geodesic {y.tolist()} -> {x.tolist()} failed: {exc}")
            return None

    results = parallel_map(evaluate, pairs, jobs)
    residuals, points = [], []
    escaped = failed = 0
    multimodal = False
    for (y, x), result in zip(pairs, results):
        points.append((x.tolist(), y.tolist(), window.t, window.s))
        if result is None or not result.converged:
            residuals.append(np.nan)
            failed += 1
            continue
        multimodal = multimodal or result.multimodal
        normal = (x - center) / radius
        velocity = geodesic_velocity(result.path, end=1)
        flux = float(velocity @ normal) / (2.0 * window.tau)
        residuals.append(scaled_residual(flux, [flux], NUMERIC))
        distances = np.linalg.norm(result.path.nodes - center[None, :], axis=1)
        if np.any(distances > radius * (1.0 + 1e-6)):
            escaped += 1

    notes = [f"confinement: {len(pairs) - escaped - failed} of {len(pairs)} geodesics stay in the ball"]
    if escaped:
        logger.warning(f"{escaped} geodesic(s) leave B_{radius}({center.tolist()})")
    uncertified = None if V.is_c2 else "potential is not C2"
    return summarize(ConditionId.BOUNDARY_1_13, residuals, points, NUMERIC, multimodal=multimodal,
                     uncertified=uncertified, notes=notes)
