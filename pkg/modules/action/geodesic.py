"""
V-Geodesic Solver
=================
Minimises the discrete energy over paths joining y to x and returns the
Agmon action omega(x, y; t, s) with the minimising path.

Methods:
1. direct   - H1-preconditioned gradient descent with backtracking on the
              discrete energy, Newton polish of the Euler-Lagrange system,
              optional shooting refinement to the continuum geodesic
2. shooting - integrate gamma'' = 2(t-s)^2 grad V(gamma) from (y, v0) and
              solve for v0 with gamma(1) = x; falls back to direct
3. dp_oracle - lattice dynamic program (d = 1)
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from scipy import optimize, sparse
from scipy.integrate import solve_ivp
from scipy.linalg import solve_banded
from scipy.sparse.linalg import spsolve

from modules.expr import ScalarField

from .energy import energy, energy_gradient, el_residual, geodesic_velocity, residual_norm
from .lattice import LatticeSpec, aligned_lattice, lattice_geodesic
from .path import PathDiscretization, TimeWindow, as_point, straight_path

logger = logging.getLogger(__name__)


class SolveMethod(str, Enum):
    """Geodesic solution method"""
    DIRECT = 'direct'
    SHOOTING = 'shooting'
    DP_ORACLE = 'dp_oracle'


class SolveStatus(str, Enum):
    """Reportable outcome of a geodesic solve"""
    CONVERGED = 'converged'
    NOT_CONVERGED = 'not_converged'
    SHOOTING_FALLBACK = 'shooting_fallback'


@dataclass
class SolverOptions:
    """Geodesic solver settings"""
    n: int = 200
    tol: float = 1e-8  # on energy decrease per iteration
    max_iter: int = 10_000
    method: SolveMethod = SolveMethod.DIRECT
    refine: bool = True  # shooting polish of the discrete minimiser
    newton_polish: bool = True
    starts: int = 1
    seed: int = 0
    initial_path: Optional[np.ndarray] = None
    lattice: Optional[LatticeSpec] = None

    def __post_init__(self):
        self.method = SolveMethod(self.method)
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if self.tol <= 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.starts < 1:
            raise ValueError(f"starts must be >= 1, got {self.starts}")


@dataclass
class AgmonResult:
    """Agmon action with its minimising path and diagnostics"""
    omega: float
    path: PathDiscretization
    iterations: int
    residual: float  # sup-norm of the discrete Euler-Lagrange residual
    method: SolveMethod
    window: TimeWindow
    status: SolveStatus = SolveStatus.CONVERGED
    multimodal: bool = False
    warnings: List[str] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.status != SolveStatus.NOT_CONVERGED


# ---------------------------------------------------------------------------
# Direct method
# ---------------------------------------------------------------------------

def _kinetic_band(n: int, tau: float) -> np.ndarray:
    """Banded form of the kinetic Hessian (n / (2 tau)) tridiag(-1, 2, -1)"""
    band = np.zeros((3, n - 1))
    band[0, 1:] = -1.0
    band[1, :] = 2.0
    band[2, :-1] = -1.0
    return band * (n / (2.0 * tau))


def _descend(path: PathDiscretization, window: TimeWindow, V: ScalarField,
             opts: SolverOptions) -> Tuple[PathDiscretization, float, int, bool]:
    """Preconditioned gradient descent with Armijo backtracking"""
    band = _kinetic_band(path.n, window.tau)
    current = energy(path, window, V)
    converged = False
    iteration = 0

    for iteration in range(1, opts.max_iter + 1):
        gradient = energy_gradient(path, window, V)
        direction = -solve_banded((1, 1), band, gradient)
        slope = float(np.sum(gradient * direction))
        if not np.isfinite(slope):
            logger.warning(f"non-finite descent direction at iteration {iteration}")
            break
        if slope >= 0 or -slope < 1e-3 * opts.tol:
            converged = True
            break

        step = 1.0
        interior = path.nodes[1:-1]
        while True:
            candidate = path.with_interior(interior + step * direction)
            trial = energy(candidate, window, V)
            if np.isfinite(trial) and trial <= current + 1e-4 * step * slope:
                break
            step *= 0.5
            if step < 1e-12:
                candidate, trial = path, current
                break

        decrease = current - trial
        path, current = candidate, trial
        logger.debug(f"descent iteration {iteration}: energy={current:.15g} step={step:.3g}")
        if decrease < opts.tol:
            converged = True
            break

    return path, current, iteration, converged


def _newton_polish(path: PathDiscretization, window: TimeWindow, V: ScalarField,
                   max_iter: int = 8) -> PathDiscretization:
    """Newton iterations on the discrete Euler-Lagrange system"""
    n, d = path.n, path.dim
    tau = window.tau
    second_difference = sparse.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(n - 1, n - 1))
    kinetic = (n * n) * sparse.kron(second_difference, sparse.identity(d))

    best, best_norm = path, residual_norm(path, window, V)
    scale = 1.0 + float(np.max(np.abs(path.nodes))) * n * n
    for _ in range(max_iter):
        if best_norm <= 1e-14 * scale:
            break
        residual = el_residual(path, window, V).ravel()
        hessians = V.hessian(path.nodes[1:-1])
        jacobian = kinetic - 2.0 * tau ** 2 * sparse.block_diag(list(hessians))
        try:
            delta = spsolve(jacobian.tocsc(), -residual)
        except RuntimeError as exc:
            logger.debug(f"Newton polish stopped: {exc}")
            break
        if not np.all(np.isfinite(delta)):
            break
        path = path.with_interior(path.nodes[1:-1] + delta.reshape(n - 1, d))
        norm = residual_norm(path, window, V)
        if norm >= 0.5 * best_norm:
            if norm < best_norm:
                best, best_norm = path, norm
            break
        best, best_norm = path, norm
    return best


def _bent_initial_paths(y: np.ndarray, x: np.ndarray, n: int, starts: int,
                        seed: int) -> List[np.ndarray]:
    """Straight segment plus seeded sinusoidal bends with the same endpoints"""
    rng = np.random.default_rng(seed)
    base = straight_path(y, x, n).nodes
    tau = np.arange(n + 1) / n
    scale = 1.0 + float(np.linalg.norm(x - y))
    paths = [base]
    for _ in range(starts - 1):
        mode = int(rng.integers(1, 4))
        direction = rng.normal(size=y.shape[0])
        direction /= np.linalg.norm(direction) or 1.0
        amplitude = scale * rng.uniform(0.2, 1.0)
        paths.append(base + amplitude * np.sin(np.pi * mode * tau)[:, None] * direction[None, :])
    return paths


def _solve_discrete(y: np.ndarray, x: np.ndarray, window: TimeWindow, V: ScalarField,
                    opts: SolverOptions, initial: np.ndarray) -> AgmonResult:
    nodes = np.array(initial, dtype=float)
    nodes[0], nodes[-1] = y, x
    path, value, iterations, converged = _descend(PathDiscretization(nodes), window, V, opts)
    if opts.newton_polish:
        polished = _newton_polish(path, window, V)
        polished_value = energy(polished, window, V)
        if polished_value <= value + 1e-10 * (1.0 + abs(value)):
            path, value = polished, polished_value

    residual = residual_norm(path, window, V)
    warnings = []
    if not converged:
        warnings.append(f"gradient descent did not converge in {opts.max_iter} iterations")
    return AgmonResult(
        omega=value,
        path=path,
        iterations=iterations,
        residual=residual,
        method=SolveMethod.DIRECT,
        window=window,
        status=SolveStatus.CONVERGED if converged else SolveStatus.NOT_CONVERGED,
        warnings=warnings,
    )


# ---------------------------------------------------------------------------
# Shooting
# ---------------------------------------------------------------------------

def _integrate(y: np.ndarray, velocity: np.ndarray, window: TimeWindow, V: ScalarField,
               n: int) -> Optional[Tuple[np.ndarray, float]]:
    """Integrate the geodesic equation with the running energy; None on failure"""
    d = y.shape[0]
    tau = window.tau

    def rhs(_, state):
        position, speed = state[:d], state[d:2 * d]
        acceleration = 2.0 * tau ** 2 * V.gradient(position)
        power = float(speed @ speed) / (4.0 * tau) + tau * float(V.value(position))
        return np.concatenate([speed, acceleration, [power]])

    initial = np.concatenate([y, velocity, [0.0]])
    with np.errstate(over='ignore', invalid='ignore'):
        solution = solve_ivp(rhs, (0.0, 1.0), initial, method='DOP853', rtol=1e-12, atol=1e-12,
                             t_eval=np.linspace(0.0, 1.0, n + 1))
    if not solution.success or not np.all(np.isfinite(solution.y)):
        return None
    return solution.y[:d].T.copy(), float(solution.y[2 * d, -1])


def _shoot(y: np.ndarray, x: np.ndarray, window: TimeWindow, V: ScalarField, n: int,
           velocity: np.ndarray) -> Optional[Tuple[np.ndarray, float, int]]:
    """Newton-type root solve on the miss distance gamma(1) - x"""
    penalty = 1e6 * (1.0 + np.abs(x))

    def miss(v):
        trajectory = _integrate(y, v, window, V, n)
        if trajectory is None:
            return penalty
        return trajectory[0][-1] - x

    solution = optimize.root(miss, velocity, method='hybr', options={'xtol': 1e-13})
    if not solution.success:
        return None
    trajectory = _integrate(y, solution.x, window, V, n)
    if trajectory is None:
        return None
    nodes, omega = trajectory
    if np.max(np.abs(nodes[-1] - x)) > 1e-9 * (1.0 + np.max(np.abs(x))):
        return None
    nodes[0], nodes[-1] = y, x
    return nodes, omega, int(solution.nfev)


def _refine(result: AgmonResult, V: ScalarField) -> AgmonResult:
    """Replace the discrete minimiser by the continuum geodesic through the same branch"""
    path = result.path
    y, x = path.start, path.end
    shot = _shoot(y, x, result.window, V, path.n, geodesic_velocity(path, end=0))
    if shot is None:
        result.warnings.append("shooting refinement failed; discrete minimiser kept")
        return result
    nodes, omega, evaluations = shot
    spread = float(np.max(np.abs(nodes - path.nodes)))
    allowed = max(1e-3, 100.0 / path.n ** 2) * (1.0 + float(np.max(np.abs(path.nodes))))
    if spread > allowed:
        result.warnings.append(f"shooting refinement left the discrete branch (spread {spread:.3g})")
        return result
    refined = PathDiscretization(nodes)
    return replace(
        result,
        omega=omega,
        path=refined,
        iterations=result.iterations + evaluations,
        residual=residual_norm(refined, result.window, V),
    )


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _solve_direct(y: np.ndarray, x: np.ndarray, window: TimeWindow, V: ScalarField,
                  opts: SolverOptions) -> AgmonResult:
    if opts.initial_path is not None:
        initial = np.asarray(opts.initial_path, dtype=float).reshape(-1, y.shape[0])
        if initial.shape[0] != opts.n + 1:
            raise ValueError(f"initial_path has {initial.shape[0]} nodes, expected {opts.n + 1}")
        initials = [initial]
    else:
        initials = _bent_initial_paths(y, x, opts.n, opts.starts, opts.seed)

    candidates = [_solve_discrete(y, x, window, V, opts, initial) for initial in initials]
    usable = [c for c in candidates if c.converged] or candidates
    best = min(usable, key=lambda c: c.omega)

    if len(usable) > 1:
        bound = 10.0 * opts.tol * opts.n ** 2
        settled = [c.omega for c in usable if c.residual <= bound]
        if settled and max(settled) - min(settled) > 1e-6:
            best.multimodal = True
            best.warnings.append(
                f"{len(settled)} starts reached distinct actions "
                f"(spread {max(settled) - min(settled):.3g}); smallest reported"
            )
            logger.warning(f"multi-modal action between {y.tolist()} and {x.tolist()}")

    if opts.refine and best.converged:
        best = _refine(best, V)
    return best


def solve_geodesic(y, x, window: TimeWindow, V: ScalarField,
                   opts: Optional[SolverOptions] = None) -> AgmonResult:
    """
    Solve the V-geodesic boundary value problem gamma(0) = y, gamma(1) = x.

    Args:
        y: Start point
        x: End point
        window: Time window (t, s)
        V: Potential field
        opts: Solver settings (defaults: n=200, tol=1e-8, direct method)

    Returns:
        AgmonResult; non-convergence is reported through its status
    """
    opts = opts or SolverOptions()
    y = as_point(y, V.dim)
    x = as_point(x, V.dim)

    if opts.method == SolveMethod.DP_ORACLE:
        lattice = opts.lattice or aligned_lattice(float(y[0]), float(x[0]))
        omega, nodes = lattice_geodesic(y, x, window, V, lattice)
        path = PathDiscretization(nodes)
        return AgmonResult(omega, path, lattice.k, residual_norm(path, window, V),
                           SolveMethod.DP_ORACLE, window)

    if opts.method == SolveMethod.SHOOTING:
        shot = _shoot(y, x, window, V, opts.n, x - y)
        if shot is not None:
            nodes, omega, evaluations = shot
            path = PathDiscretization(nodes)
            return AgmonResult(omega, path, evaluations, residual_norm(path, window, V),
                               SolveMethod.SHOOTING, window)
        logger.warning(f"shooting diverged for y={y.tolist()} x={x.tolist()}; falling back to direct")
        result = _solve_direct(y, x, window, V, replace(opts, method=SolveMethod.DIRECT))
        result.warnings.append("shooting diverged; direct method used")
        if result.converged:
            result.status = SolveStatus.SHOOTING_FALLBACK
        return result

    result = _solve_direct(y, x, window, V, opts)
    if not result.converged:
        logger.warning(f"geodesic solve did not converge for y={y.tolist()} x={x.tolist()} "
                       f"(t={window.t}, s={window.s})")
    return result
