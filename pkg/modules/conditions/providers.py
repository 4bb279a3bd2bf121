"""
Omega Providers
===============
Uniform access to omega(x, y; t, s) and its derivatives, either from the
closed forms (analytic derivatives via SymPy) or from the geodesic solver
(finite differences).
"""

import logging
from dataclasses import dataclass, replace
from typing import Optional, Protocol, Sequence

import numpy as np
import sympy as sp

from modules.action import (
    OmegaDerivatives,
    SolverOptions,
    StencilSolveError,
    TimeWindow,
    omega_derivatives,
    parallel_map,
    solve_geodesic,
)
from modules.closedform import omega_expression, omega_heat_values, omega_quadratic_values
from modules.expr import ScalarField

logger = logging.getLogger(__name__)


@dataclass
class OmegaBatch:
    """Batch evaluation result; failed entries hold NaN"""
    values: np.ndarray
    failed: np.ndarray
    multimodal: np.ndarray


class OmegaProvider(Protocol):
    name: str
    analytic: bool
    dim: int

    def omega(self, x, y, t: float, s: float) -> float: ...

    def omega_batch(self, X, Y, T, S, jobs: int = 1) -> OmegaBatch: ...

    def derivatives(self, x, y, t: float, s: float, order: int = 1) -> OmegaDerivatives: ...


def _rows(values, dim: int) -> np.ndarray:
    array = np.asarray(values, dtype=float)
    if dim == 1 and (array.ndim == 1 or array.ndim == 0):
        array = array.reshape(-1, 1)
    return array.reshape(-1, dim)


class _SymbolicOmega:
    """Closed-form action with SymPy-derived derivatives"""

    analytic = True

    def __init__(self, dim: int, C1: Optional[float] = None, C2: float = 0.0, a=None):
        self.dim = dim
        expression, xs, ys, t, s = omega_expression(dim, C1=C1, C2=C2, a=a)
        arguments = (*xs, *ys, t, s)
        compile_ = lambda e: sp.lambdify(arguments, e, modules='numpy')
        self.expression = expression
        self._dt = compile_(sp.diff(expression, t))
        self._ds = compile_(sp.diff(expression, s))
        self._grad_x = [compile_(sp.diff(expression, xi)) for xi in xs]
        self._grad_y = [compile_(sp.diff(expression, yi)) for yi in ys]
        self._lap_x = compile_(sp.Add(*(sp.diff(expression, xi, 2) for xi in xs)))
        self._lap_y = compile_(sp.Add(*(sp.diff(expression, yi, 2) for yi in ys)))
        self._mixed = [compile_(sp.diff(expression, xi, yi)) for xi, yi in zip(xs, ys)]

    def _values(self, X, Y, tau):
        raise NotImplementedError

    def omega(self, x, y, t: float, s: float) -> float:
        TimeWindow(s=s, t=t)
        return float(self._values(_rows(x, self.dim)[0], _rows(y, self.dim)[0], t - s))

    def omega_batch(self, X, Y, T, S, jobs: int = 1) -> OmegaBatch:
        X, Y = _rows(X, self.dim), _rows(Y, self.dim)
        tau = np.asarray(T, dtype=float) - np.asarray(S, dtype=float)
        values = np.asarray(self._values(X, Y, tau), dtype=float).reshape(-1)
        return OmegaBatch(values, np.zeros(values.shape, bool), np.zeros(values.shape, bool))

    def derivatives(self, x, y, t: float, s: float, order: int = 1) -> OmegaDerivatives:
        TimeWindow(s=s, t=t)
        arguments = (*_rows(x, self.dim)[0], *_rows(y, self.dim)[0], t, s)
        evaluate = lambda f: float(f(*arguments))
        result = OmegaDerivatives(
            omega=self.omega(x, y, t, s),
            dt=evaluate(self._dt),
            ds=evaluate(self._ds),
            grad_x=np.array([evaluate(f) for f in self._grad_x]),
            grad_y=np.array([evaluate(f) for f in self._grad_y]),
        )
        if order == 2:
            result.lap_x = evaluate(self._lap_x)
            result.lap_y = evaluate(self._lap_y)
            result.mixed = np.array([evaluate(f) for f in self._mixed])
        return result


class HeatOmega(_SymbolicOmega):
    """omega = |x - y|^2 / (4(t - s)) for V = 0"""

    def __init__(self, dim: int):
        super().__init__(dim)
        self.name = 'closed_heat'

    def _values(self, X, Y, tau):
        return omega_heat_values(X, Y, tau)


class QuadraticOmega(_SymbolicOmega):
    """Closed-form action for V = C1^2 |x - a|^2 + C2"""

    def __init__(self, dim: int, C1: float, C2: float = 0.0, a=None):
        if C1 == 0:
            raise ValueError("quadratic action requires C1 != 0")
        super().__init__(dim, C1=C1, C2=C2, a=a)
        self.name = 'closed_quadratic'
        self.C1, self.C2, self.a = C1, C2, a

    def _values(self, X, Y, tau):
        return omega_quadratic_values(X, Y, tau, self.C1, self.C2, self.a)


class NumericOmega:
    """Action from the geodesic solver; derivatives by finite differences"""

    analytic = False

    def __init__(self, V: ScalarField, opts: Optional[SolverOptions] = None,
                 derivative_opts: Optional[SolverOptions] = None, box_size: float = 1.0,
                 jobs: int = 1):
        self.V = V
        self.dim = V.dim
        self.name = 'numeric'
        self.opts = opts or SolverOptions()
        # Stencil solves use the polished discrete minimiser; its value is smooth in the endpoints
        self.derivative_opts = derivative_opts or replace(self.opts, refine=False)
        self.box_size = box_size
        self.jobs = jobs

    def omega(self, x, y, t: float, s: float) -> float:
        result = solve_geodesic(y, x, TimeWindow(s=s, t=t), self.V, self.opts)
        if not result.converged:
            raise StencilSolveError('base', result.status.value)
        return result.omega

    def omega_batch(self, X, Y, T, S, jobs: int = 1) -> OmegaBatch:
        X, Y = _rows(X, self.dim), _rows(Y, self.dim)
        T = np.asarray(T, dtype=float).reshape(-1)
        S = np.asarray(S, dtype=float).reshape(-1)

        def evaluate(index: int):
            try:
                result = solve_geodesic(Y[index], X[index], TimeWindow(s=S[index], t=T[index]),
                                        self.V, self.opts)
            except (ValueError, FloatingPointError) as exc:
                logger.warning(f"omega evaluation failed at sample {index}: {exc}")
                return np.nan, True, False
            if not result.converged:
                return np.nan, True, False
            return result.omega, False, result.multimodal

        outcomes = parallel_map(evaluate, range(X.shape[0]), jobs)
        values = np.array([o[0] for o in outcomes], dtype=float)
        failed = np.array([o[1] for o in outcomes], dtype=bool)
        multimodal = np.array([o[2] for o in outcomes], dtype=bool)
        if failed.any():
            logger.warning(f"{int(failed.sum())} of {len(failed)} geodesic solves failed")
        return OmegaBatch(values, failed, multimodal)

    def derivatives(self, x, y, t: float, s: float, order: int = 1) -> OmegaDerivatives:
        return omega_derivatives(y, x, TimeWindow(s=s, t=t), self.V, order=order,
                                 opts=self.derivative_opts, box_size=self.box_size, jobs=self.jobs)


class ShiftedOmega:
    """omega + alpha (t - s), the action of V + alpha"""

    def __init__(self, base: OmegaProvider, alpha: float):
        self.base = base
        self.alpha = float(alpha)
        self.dim = base.dim
        self.analytic = base.analytic
        self.name = f"{base.name}+shift"

    def omega(self, x, y, t: float, s: float) -> float:
        return self.base.omega(x, y, t, s) + self.alpha * (t - s)

    def omega_batch(self, X, Y, T, S, jobs: int = 1) -> OmegaBatch:
        batch = self.base.omega_batch(X, Y, T, S, jobs)
        tau = np.asarray(T, dtype=float).reshape(-1) - np.asarray(S, dtype=float).reshape(-1)
        return OmegaBatch(batch.values + self.alpha * tau, batch.failed, batch.multimodal)

    def derivatives(self, x, y, t: float, s: float, order: int = 1) -> OmegaDerivatives:
        result = self.base.derivatives(x, y, t, s, order)
        return replace(result, omega=result.omega + self.alpha * (t - s),
                       dt=result.dt + self.alpha, ds=result.ds - self.alpha)


def provider_for(source: str, dim: int, V: Optional[ScalarField] = None,
                 C1: Optional[float] = None, C2: float = 0.0, a: Optional[Sequence[float]] = None,
                 opts: Optional[SolverOptions] = None, box_size: float = 1.0,
                 jobs: int = 1) -> OmegaProvider:
    """
    Build a provider by name: closed_heat, closed_quadratic or numeric.
    """
    if source == 'closed_heat':
        return HeatOmega(dim)
    if source == 'closed_quadratic':
        if C1 is None:
            raise ValueError("closed_quadratic requires C1")
        return QuadraticOmega(dim, C1, C2, a)
    if source == 'numeric':
        if V is None:
            raise ValueError("numeric omega requires a potential")
        return NumericOmega(V, opts=opts, box_size=box_size, jobs=jobs)
    raise ValueError(f"unknown omega source {source!r}")
