"""
Action Derivatives
==================
Central finite differences of omega(x, y; t, s) in t, s, x and y. Every
stencil point re-solves the geodesic warm-started from the base path,
shifted linearly to the moved endpoints.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional

import numpy as np

from modules.expr import ScalarField

from .geodesic import AgmonResult, SolverOptions, solve_geodesic
from .path import TimeWindow, as_point
from .workers import parallel_map

logger = logging.getLogger(__name__)


class StencilSolveError(RuntimeError):
    """Raised when the geodesic solve fails at a stencil point"""

    def __init__(self, corner: str, detail: str):
        self.corner = corner
        super().__init__(f"geodesic solve failed at stencil corner {corner}: {detail}")


@dataclass
class OmegaDerivatives:
    """Derivatives of omega at one (x, y, t, s)"""
    omega: float
    dt: float
    ds: float
    grad_x: np.ndarray
    grad_y: np.ndarray
    lap_x: float = float('nan')
    lap_y: float = float('nan')
    mixed: np.ndarray = field(default_factory=lambda: np.array([]))  # d2 omega / dx_i dy_i
    multimodal: bool = False

    @property
    def mixed_sum(self) -> float:
        return float(np.sum(self.mixed))


@dataclass(frozen=True)
class _Corner:
    label: str
    dx: np.ndarray
    dy: np.ndarray
    dt: float = 0.0
    ds: float = 0.0


def _stencil(dim: int, hx: float, ht: float, order: int) -> List[_Corner]:
    """Fixed-order stencil; the join below relies on this ordering"""
    zero = np.zeros(dim)
    corners = [
        _Corner('t+', zero, zero, dt=ht),
        _Corner('t-', zero, zero, dt=-ht),
        _Corner('s+', zero, zero, ds=ht),
        _Corner('s-', zero, zero, ds=-ht),
    ]
    for i in range(dim):
        unit = np.zeros(dim)
        unit[i] = 1.0
        corners += [
            _Corner(f'x{i + 1}+', hx * unit, zero),
            _Corner(f'x{i + 1}-', -hx * unit, zero),
            _Corner(f'y{i + 1}+', zero, hx * unit),
            _Corner(f'y{i + 1}-', zero, -hx * unit),
        ]
    if order == 2:
        big = 10.0 * hx
        for i in range(dim):
            unit = np.zeros(dim)
            unit[i] = 1.0
            corners += [
                _Corner(f'x{i + 1}++', big * unit, zero),
                _Corner(f'x{i + 1}--', -big * unit, zero),
                _Corner(f'y{i + 1}++', zero, big * unit),
                _Corner(f'y{i + 1}--', zero, -big * unit),
                _Corner(f'x{i + 1}+y{i + 1}+', big * unit, big * unit),
                _Corner(f'x{i + 1}+y{i + 1}-', big * unit, -big * unit),
                _Corner(f'x{i + 1}-y{i + 1}+', -big * unit, big * unit),
                _Corner(f'x{i + 1}-y{i + 1}-', -big * unit, -big * unit),
            ]
    return corners


def omega_derivatives(y, x, window: TimeWindow, V: ScalarField, order: int = 1,
                      opts: Optional[SolverOptions] = None, box_size: float = 1.0,
                      h_space: Optional[float] = None, h_time: Optional[float] = None,
                      jobs: int = 1, base: Optional[AgmonResult] = None) -> OmegaDerivatives:
    """
    Finite-difference derivatives of the Agmon action.

    Args:
        y, x: Endpoints
        window: Time window (t, s)
        V: Potential field
        order: 1 for first derivatives, 2 to add Laplacians and mixed terms
        opts: Geodesic solver settings used at every stencil point
        box_size: Working box size; default space step is 1e-3 * box_size
        h_space: Override for the space step (second differences use 10x)
        h_time: Override for the time step (default 1e-3 * (t - s))
        jobs: Worker count for the stencil solves
        base: Already solved base point (must use the same settings)

    Returns:
        OmegaDerivatives

    Raises:
        StencilSolveError: The base or any stencil solve did not converge
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    opts = replace(opts or SolverOptions(), initial_path=None)
    y = as_point(y, V.dim)
    x = as_point(x, V.dim)
    dim = V.dim

    base = base or solve_geodesic(y, x, window, V, opts)
    if not base.converged:
        raise StencilSolveError('base', base.status.value)

    hx = h_space if h_space is not None else 1e-3 * box_size
    ht = h_time if h_time is not None else 1e-3 * window.tau
    if ht >= window.s:
        raise ValueError(f"time step {ht} would leave the window (s={window.s})")

    corners = _stencil(dim, hx, ht, order)
    weights = base.path.parameters[:, None]
    single = replace(opts, starts=1)

    def evaluate(corner: _Corner) -> AgmonResult:
        shifted = TimeWindow(s=window.s + corner.ds, t=window.t + corner.dt)
        warm = base.path.nodes + weights * corner.dx[None, :] + (1.0 - weights) * corner.dy[None, :]
        return solve_geodesic(y + corner.dy, x + corner.dx, shifted, V,
                              replace(single, initial_path=warm))

    results = parallel_map(evaluate, corners, jobs)
    values: Dict[str, float] = {}
    multimodal = base.multimodal
    for corner, result in zip(corners, results):
        if not result.converged:
            raise StencilSolveError(corner.label, result.status.value)
        values[corner.label] = result.omega
        multimodal = multimodal or result.multimodal

    center = base.omega
    derivatives = OmegaDerivatives(
        omega=center,
        dt=(values['t+'] - values['t-']) / (2 * ht),
        ds=(values['s+'] - values['s-']) / (2 * ht),
        grad_x=np.array([(values[f'x{i}+'] - values[f'x{i}-']) / (2 * hx) for i in range(1, dim + 1)]),
        grad_y=np.array([(values[f'y{i}+'] - values[f'y{i}-']) / (2 * hx) for i in range(1, dim + 1)]),
        multimodal=multimodal,
    )
    if order == 2:
        big = 10.0 * hx
        derivatives.lap_x = sum(
            (values[f'x{i}++'] - 2 * center + values[f'x{i}--']) / big ** 2 for i in range(1, dim + 1)
        )
        derivatives.lap_y = sum(
            (values[f'y{i}++'] - 2 * center + values[f'y{i}--']) / big ** 2 for i in range(1, dim + 1)
        )
        derivatives.mixed = np.array([
            (values[f'x{i}+y{i}+'] - values[f'x{i}+y{i}-']
             - values[f'x{i}-y{i}+'] + values[f'x{i}-y{i}-']) / (4 * big ** 2)
            for i in range(1, dim + 1)
        ])
    if multimodal:
        logger.warning(f"omega derivatives at x={x.tolist()} y={y.tolist()} cross a multi-modal region")
    return derivatives
