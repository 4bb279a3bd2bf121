"""
Closed-Form Actions
===================
Agmon action and geodesics for V = 0 and for the quadratic potential
V = C1^2 |x - a|^2 + C2, plus SymPy forms of both families for exact
derivatives.
"""

from typing import Optional, Sequence, Tuple

import numpy as np
import sympy as sp

from modules.action import TimeWindow

from .kernels import log_sinh


def _pair(x, y) -> Tuple[np.ndarray, np.ndarray]:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape[-1] != y.shape[-1]:
        raise ValueError(f"endpoints differ in dimension: {x.shape} vs {y.shape}")
    return x, y


def _centre(a, dim: int) -> np.ndarray:
    if a is None:
        return np.zeros(dim)
    centre = np.broadcast_to(np.asarray(a, dtype=float), (dim,))
    return np.array(centre)


def _inverse_sinh(z):
    """1/sinh(z) = 2 e^-z / (1 - e^-2z), stable for large z > 0"""
    return 2.0 * np.exp(-z) / (-np.expm1(-2.0 * z))


def _finish(value):
    return float(value) if np.ndim(value) == 0 else value


def omega_heat_values(x, y, tau):
    """|x - y|^2 / (4 tau), vectorised over leading axes"""
    x, y = _pair(x, y)
    return _finish(np.sum((x - y) ** 2, axis=-1) / (4.0 * np.asarray(tau, dtype=float)))


def omega_heat(x, y, window: TimeWindow) -> float:
    """Agmon action for V = 0"""
    return omega_heat_values(x, y, window.tau)


def omega_quadratic_values(x, y, tau, C1: float, C2: float = 0.0, a=None):
    """
    (C1/2)(|x-y|^2 / sinh(2 C1 tau) + (|x-a|^2 + |y-a|^2) tanh(C1 tau)) + C2 tau,
    vectorised over leading axes; the formula is even in C1.
    """
    if C1 == 0:
        raise ValueError("quadratic action requires C1 != 0")
    x, y = _pair(x, y)
    centre = _centre(a, x.shape[-1])
    tau = np.asarray(tau, dtype=float)
    c = abs(C1)
    spread = np.sum((x - y) ** 2, axis=-1)
    anchor = np.sum((x - centre) ** 2, axis=-1) + np.sum((y - centre) ** 2, axis=-1)
    value = 0.5 * c * (spread * _inverse_sinh(2.0 * c * tau) + anchor * np.tanh(c * tau)) + C2 * tau
    return _finish(value)


def omega_quadratic(x, y, window: TimeWindow, C1: float, C2: float = 0.0, a=None) -> float:
    """Agmon action for V = C1^2 |x - a|^2 + C2"""
    return omega_quadratic_values(x, y, window.tau, C1, C2, a)


def geodesic_quadratic(x, y, window: TimeWindow, C1: float, a=None, tau=0.5) -> np.ndarray:
    """
    Minimising curve of the quadratic action at parameter(s) tau in [0, 1]:

        a + [sinh(2 C1 tau T)(x - a) + sinh(2 C1 (1 - tau) T)(y - a)] / sinh(2 C1 T),

    with T = t - s. Returns shape (d,) for scalar tau, (len(tau), d) otherwise.
    """
    if C1 == 0:
        raise ValueError("quadratic geodesic requires C1 != 0")
    x, y = _pair(x, y)
    centre = _centre(a, x.shape[-1])
    parameter = np.asarray(tau, dtype=float)
    if np.any((parameter < 0) | (parameter > 1)):
        raise ValueError(f"curve parameter must lie in [0, 1], got {tau}")
    c = abs(C1)
    total = 2.0 * c * window.tau
    with np.errstate(divide='ignore'):
        forward = np.exp(log_sinh(total * parameter) - log_sinh(total))
        backward = np.exp(log_sinh(total * (1.0 - parameter)) - log_sinh(total))
    forward = np.asarray(forward)[..., None]
    backward = np.asarray(backward)[..., None]
    return centre + forward * (x - centre) + backward * (y - centre)


def omega_expression(dim: int, C1: Optional[float] = None, C2: float = 0.0,
                     a: Optional[Sequence[float]] = None):
    """
    SymPy form of the closed-form action.

    C1 = None gives the V = 0 family |x - y|^2 / (4(t - s)).

    Returns:
        (expression, x symbols, y symbols, t symbol, s symbol)
    """
    xs = sp.symbols(f'x1:{dim + 1}', real=True)
    ys = sp.symbols(f'y1:{dim + 1}', real=True)
    t, s = sp.symbols('t s', positive=True)
    tau = t - s
    spread = sum((xi - yi) ** 2 for xi, yi in zip(xs, ys))
    if C1 is None:
        return spread / (4 * tau), xs, ys, t, s

    c = sp.nsimplify(abs(C1), rational=True)
    centre = [sp.nsimplify(v, rational=True) for v in _centre(a, dim)]
    anchor = sum((xi - ai) ** 2 for xi, ai in zip(xs, centre)) + sum((yi - ai) ** 2 for yi, ai in zip(ys, centre))
    shift = sp.nsimplify(C2, rational=True)
    expression = c / 2 * (spread / sp.sinh(2 * c * tau) + anchor * sp.tanh(c * tau)) + shift * tau
    return expression, xs, ys, t, s
