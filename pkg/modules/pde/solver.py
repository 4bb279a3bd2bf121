"""
Neumann Solver
==============
theta-scheme time stepping for du/dt = Laplacian u - V u on a box with
homogeneous Neumann faces (ghost-node reflection), and the drift equation
through v = e^{-f} u.

Crank-Nicolson (theta = 1/2) is the default; backward Euler (theta = 1) is
used for rough initial data. Linear systems are solved directly: banded
LU for d = 1, sparse LU for d = 2, one factorisation per distinct step.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Union

import numpy as np
import pandas as pd
from scipy import sparse
from scipy.interpolate import RegularGridInterpolator
from scipy.linalg import LinAlgError, solve_banded
from scipy.sparse.linalg import splu

from modules.closedform import drift_transform, is_zero_drift
from modules.expr import PotentialExpr, ScalarField, differentiate

from .grid import BoxGrid, InitialData

logger = logging.getLogger(__name__)

LONG_RUN_STEPS = 1_000_000
ROUGH_JUMP_FRACTION = 0.5


class Scheme(str, Enum):
    CRANK_NICOLSON = 'crank_nicolson'
    BACKWARD_EULER = 'backward_euler'

    @property
    def theta(self) -> float:
        return 0.5 if self == Scheme.CRANK_NICOLSON else 1.0


class NonPositiveSolutionError(RuntimeError):
    """Raised when a step produces a non-positive or non-finite value; halve dt and retry"""

    def __init__(self, step: int, time: float, minimum: float):
        super().__init__(f"non-positive solution at step {step} (t={time:.6g}, min={minimum:.3e})")
        self.step = step
        self.time = time
        self.minimum = minimum


class SingularSystemError(RuntimeError):
    """Raised when a step matrix cannot be factorised"""


InitialInput = Union[InitialData, ScalarField, PotentialExpr]


@dataclass
class GridSolution:
    """
    Snapshots of a positive solution.

    snapshots maps each output time to a read-only array of shape
    (nx,) * d in 'ij' node order.
    """
    grid: BoxGrid
    snapshots: Dict[float, np.ndarray]
    min_value: float
    scheme: Scheme
    potential: PotentialExpr
    initial: InitialInput
    drift: Optional[PotentialExpr] = None
    drift_potential: Optional[PotentialExpr] = None
    steps: int = 0
    warnings: List[str] = field(default_factory=list)

    @property
    def times(self) -> List[float]:
        return sorted(self.snapshots)

    def snapshot(self, t: float) -> np.ndarray:
        """Field at an output time (matched to 1e-12)"""
        for time in self.snapshots:
            if abs(time - t) <= 1e-12 * max(1.0, abs(t)):
                return self.snapshots[time]
        raise ValueError(f"no snapshot at t={t}; available {self.times}")

    def interpolate(self, points, t: float) -> np.ndarray:
        """Linear (d = 1) or bilinear (d = 2) interpolation of the snapshot at t"""
        interpolator = RegularGridInterpolator(tuple(self.grid.axes), self.snapshot(t), method='linear')
        points = np.asarray(points, dtype=float)
        if points.ndim == 0 or (self.grid.d == 1 and points.shape[-1:] != (1,)):
            points = points[..., None]
        return interpolator(points)

    def to_frame(self) -> pd.DataFrame:
        """Long table with columns t, x1[, x2], u"""
        nodes = self.grid.nodes()
        frames = []
        for t in self.times:
            frame = pd.DataFrame(nodes, columns=[f"x{i + 1}" for i in range(self.grid.d)])
            frame.insert(0, 't', t)
            frame['u'] = self.snapshots[t].ravel()
            frames.append(frame)
        return pd.concat(frames, ignore_index=True)

    def refined(self) -> 'GridSolution':
        """Re-solve at twice the resolution in space and time"""
        grid = self.grid.refined()
        logger.info(f"refining solution to nx={grid.nx}, dt={grid.dt:.3e}")
        if self.drift is not None:
            return solve_drift(self.drift, self.drift_potential, self.initial, grid, scheme=self.scheme)
        return solve(self.potential, self.initial, grid, scheme=self.scheme)


def neumann_laplacian(grid: BoxGrid) -> sparse.csr_matrix:
    """
    Discrete Laplacian with reflected ghost nodes.

    Constants lie in the kernel exactly: every row sums to zero.
    """
    blocks = []
    for h in grid.spacing:
        n = grid.nx
        inv = 1.0 / (h * h)
        lower = np.full(n - 1, inv)
        upper = np.full(n - 1, inv)
        upper[0] = 2.0 * inv
        lower[-1] = 2.0 * inv
        blocks.append(sparse.diags([lower, np.full(n, -2.0 * inv), upper], [-1, 0, 1], format='csr'))
    if grid.d == 1:
        return blocks[0]
    identity = sparse.identity(grid.nx, format='csr')
    return (sparse.kron(blocks[0], identity) + sparse.kron(identity, blocks[1])).tocsr()


class _Stepper:
    """theta-scheme step for one grid and potential, factorised per step size"""

    def __init__(self, grid: BoxGrid, potential_values: np.ndarray, scheme: Scheme):
        self.grid = grid
        self.theta = scheme.theta
        self.operator = (neumann_laplacian(grid) - sparse.diags(potential_values.ravel())).tocsr()
        self.identity = sparse.identity(self.operator.shape[0], format='csr')
        self._cache: Dict[float, tuple] = {}

    def _factor(self, dt: float):
        if dt not in self._cache:
            implicit = (self.identity - self.theta * dt * self.operator).tocsc()
            explicit = (self.identity + (1.0 - self.theta) * dt * self.operator).tocsr()
            if self.grid.d == 1:
                banded = np.zeros((3, implicit.shape[0]))
                banded[0, 1:] = implicit.diagonal(1)
                banded[1, :] = implicit.diagonal(0)
                banded[2, :-1] = implicit.diagonal(-1)
                solver = banded
            else:
                try:
                    solver = splu(implicit)
                except RuntimeError as exc:
                    raise SingularSystemError(f"step matrix is singular for dt={dt}: {exc}") from exc
            self._cache[dt] = (solver, explicit)
            logger.debug(f"factorised step matrix for dt={dt:.6g}")
        return self._cache[dt]

    def step(self, u: np.ndarray, dt: float) -> np.ndarray:
        solver, explicit = self._factor(dt)
        rhs = explicit @ u
        if self.grid.d == 1:
            try:
                return solve_banded((1, 1), solver, rhs, check_finite=False)
            except (LinAlgError, ValueError) as exc:
                raise SingularSystemError(f"banded solve failed for dt={dt}: {exc}") from exc
        return solver.solve(rhs)


def _step_plan(grid: BoxGrid):
    """(target time, step count, step size) per output interval; every target is hit exactly"""
    plan = []
    previous = 0.0
    for target in grid.output_times:
        span = target - previous
        count = max(1, int(np.ceil(span / grid.dt - 1e-9)))
        plan.append((target, count, span / count))
        previous = target
    return plan


def _is_rough(initial: InitialInput, values: np.ndarray, dim: int) -> bool:
    if isinstance(initial, InitialData) and initial.is_rough(dim):
        return True
    if isinstance(initial, (ScalarField, PotentialExpr)) and not initial.is_c2:
        return True
    jumps = [np.max(np.abs(np.diff(values, axis=axis))) for axis in range(values.ndim)]
    return max(jumps) > ROUGH_JUMP_FRACTION * np.max(np.abs(values))


def _initial_values(initial: InitialInput, grid: BoxGrid) -> np.ndarray:
    nodes = grid.nodes()
    if isinstance(initial, InitialData):
        values = initial.evaluate(nodes)
    else:
        source = differentiate(initial) if isinstance(initial, PotentialExpr) else initial
        if source.dim != grid.d:
            raise ValueError(f"initial data has dimension {source.dim}, grid has {grid.d}")
        values = source.value(nodes)
    return np.asarray(values, dtype=float).reshape(grid.shape)


def _as_field(V: Union[ScalarField, PotentialExpr]) -> ScalarField:
    return differentiate(V) if isinstance(V, PotentialExpr) else V


def _march(V: ScalarField, u0: np.ndarray, grid: BoxGrid, scheme: Scheme):
    """Advance u0 through every output time; returns snapshots, minimum and step count"""
    if not np.all(np.isfinite(u0)) or u0.min() <= 0:
        raise ValueError("initial data must be finite and positive on every grid node")
    potential_values = V.value(grid.nodes())
    if not np.all(np.isfinite(potential_values)):
        raise ValueError(f"potential {V.expr} is not finite on the grid")

    stepper = _Stepper(grid, potential_values, scheme)
    u = u0.ravel().copy()
    minimum = float(u.min())
    snapshots: Dict[float, np.ndarray] = {}
    step, time = 0, 0.0
    for target, count, dt in _step_plan(grid):
        for _ in range(count):
            u = stepper.step(u, dt)
            step += 1
            time += dt
            low = float(np.min(u))
            if not np.isfinite(low) or not np.all(np.isfinite(u)) or low <= 0:
                raise NonPositiveSolutionError(step, time, low)
            minimum = min(minimum, low)
        time = target
        snapshot = u.reshape(grid.shape).copy()
        snapshot.setflags(write=False)
        snapshots[target] = snapshot
    return snapshots, minimum, step


def solve(V: Union[ScalarField, PotentialExpr], u0: InitialInput, grid: BoxGrid,
          scheme: Optional[Scheme] = None) -> GridSolution:
    """
    Positive solution of du/dt = Laplacian u - V u with Neumann faces.

    Args:
        V: Potential, evaluated once at the grid nodes
        u0: Initial data (preset, expression or compiled field), positive on the grid
        grid: Box grid with time step and output times
        scheme: Force a scheme; by default Crank-Nicolson, backward Euler for rough u0

    Returns:
        GridSolution with snapshots at every output time

    Raises:
        NonPositiveSolutionError: A step produced a non-positive value
        SingularSystemError: A step matrix could not be factorised
    """
    field_ = _as_field(V)
    if field_.dim != grid.d:
        raise ValueError(f"potential has dimension {field_.dim}, grid has {grid.d}")
    values = _initial_values(u0, grid)
    if scheme is None:
        scheme = Scheme.BACKWARD_EULER if _is_rough(u0, values, grid.d) else Scheme.CRANK_NICOLSON
    scheme = Scheme(scheme)
    logger.info(f"solving with V = {field_.expr} on nx={grid.nx}^{grid.d}, dt={grid.dt:.3e}, "
                f"t_end={grid.t_end}, scheme={scheme.value}")

    snapshots, minimum, steps = _march(field_, values, grid, scheme)
    logger.info(f"solve finished after {steps} steps, min value {minimum:.3e}")
    return GridSolution(grid=grid, snapshots=snapshots, min_value=minimum, scheme=scheme,
                        potential=field_.expr, initial=u0, steps=steps,
                        warnings=list(field_.warnings))


def solve_drift(f: PotentialExpr, V: PotentialExpr, u0: InitialInput, grid: BoxGrid,
                scheme: Optional[Scheme] = None) -> GridSolution:
    """
    Positive solution of du/dt = Laplacian u - 2 grad f . grad u - V u.

    Solves for v = e^{-f} u with the effective potential
    |grad f|^2 - Laplacian f + V and Neumann faces for v, then maps back.
    A zero drift defers to solve unchanged.

    Returns:
        GridSolution of u; potential holds the effective potential
    """
    if is_zero_drift(f):
        return solve(V, u0, grid, scheme=scheme)
    effective = drift_transform(f, V)
    f_values = differentiate(f).value(grid.nodes()).reshape(grid.shape)
    v0 = _initial_values(u0, grid) * np.exp(-f_values)
    if scheme is None:
        scheme = Scheme.BACKWARD_EULER if _is_rough(u0, v0, grid.d) else Scheme.CRANK_NICOLSON
    scheme = Scheme(scheme)
    logger.info(f"solving drift f = {f} through effective potential {effective}")

    inner, _, steps = _march(differentiate(effective), v0, grid, scheme)
    weight = np.exp(f_values)
    snapshots = {}
    for t, v in inner.items():
        u = v * weight
        u.setflags(write=False)
        snapshots[t] = u
    minimum = min(float(u.min()) for u in snapshots.values())
    return GridSolution(grid=grid, snapshots=snapshots, min_value=minimum, scheme=scheme,
                        potential=effective, initial=u0, drift=f, drift_potential=V, steps=steps,
                        warnings=list(effective.warnings))



def stability_probe(grid: BoxGrid, V: Union[ScalarField, PotentialExpr]) -> float:
    """
    Suggested time step: dt * max|V| <= 0.1 and dt / dx^2 <= 10.

    Crank-Nicolson is unconditionally stable; the bounds keep it accurate.
    """
    bound = float(np.max(np.abs(_as_field(V).value(grid.nodes()))))
    dx = min(grid.spacing)
    dt = 10.0 * dx * dx
    if bound > 0:
        dt = min(dt, 0.1 / bound)
    steps = grid.t_end / dt
    if steps > LONG_RUN_STEPS:
        logger.warning(f"suggested dt={dt:.3e} needs about {steps:.3g} steps to reach t={grid.t_end}")
    return dt


def neumann_flux(solution: GridSolution) -> Dict[float, np.ndarray]:
    """
    Outward normal derivative at every boundary node, per output time.

    Uses the one-sided second-order stencil (-3 u0 + 4 u1 - u2) / (2h) on
    each face; values are concatenated face by face.
    """
    fluxes = {}
    for t in solution.times:
        u = solution.snapshots[t]
        faces = []
        for axis, h in enumerate(solution.grid.spacing):
            moved = np.moveaxis(u, axis, 0)
            low = -(-3.0 * moved[0] + 4.0 * moved[1] - moved[2]) / (2.0 * h)
            high = (3.0 * moved[-1] - 4.0 * moved[-2] + moved[-3]) / (2.0 * h)
            faces.extend([np.atleast_1d(low).ravel(), np.atleast_1d(high).ravel()])
        fluxes[t] = np.concatenate(faces)
    return fluxes
