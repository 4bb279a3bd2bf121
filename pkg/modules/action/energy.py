"""
Discrete Energy
===============
The energy functional E[gamma; t, s] on uniform piecewise-linear paths,
its gradient and the discrete Euler-Lagrange residual.

Kinetic term is exact on each linear segment; the potential term uses the
trapezoid rule so the residual and the gradient share one stencil.
"""

import numpy as np

from modules.expr import ScalarField

from .path import PathDiscretization, TimeWindow


def energy(path: PathDiscretization, window: TimeWindow, V: ScalarField) -> float:
    """
    E = 1/(4(t-s)) sum n|dgamma|^2 + (t-s) sum (1/n)(V_i + V_{i+1})/2

    Args:
        path: Nodes on the uniform [0, 1] parametrisation
        window: Time window (t, s)
        V: Potential field

    Returns:
        Discrete energy
    """
    nodes = path.nodes
    n = path.n
    tau = window.tau
    steps = np.diff(nodes, axis=0)
    kinetic = n * float(np.sum(steps * steps)) / (4.0 * tau)
    values = V.value(nodes)
    potential = tau * float(np.sum(values[:-1] + values[1:])) / (2.0 * n)
    return kinetic + potential


def reparametrized_energy(path: PathDiscretization, window: TimeWindow, V: ScalarField) -> float:
    """
    Same quadrature with the nodes read as gamma(sigma_i), sigma_i = s + i h,
    h = (t-s)/n, on the window [s, t]:

        E = sum |dgamma|^2 / (4h) + sum h (V_i + V_{i+1})/2
    """
    nodes = path.nodes
    h = window.tau / path.n
    steps = np.diff(nodes, axis=0)
    kinetic = float(np.sum(steps * steps)) / (4.0 * h)
    values = V.value(nodes)
    potential = h * float(np.sum(values[:-1] + values[1:])) / 2.0
    return kinetic + potential


def el_residual(path: PathDiscretization, window: TimeWindow, V: ScalarField) -> np.ndarray:
    """
    Discrete Euler-Lagrange residual at interior nodes,
    n^2 (gamma_{i+1} - 2 gamma_i + gamma_{i-1}) - 2 (t-s)^2 grad V(gamma_i).

    Returns:
        Array of shape (n-1, d)
    """
    nodes = path.nodes
    n = path.n
    second_difference = nodes[2:] - 2.0 * nodes[1:-1] + nodes[:-2]
    return n * n * second_difference - 2.0 * window.tau ** 2 * V.gradient(nodes[1:-1])


def energy_gradient(path: PathDiscretization, window: TimeWindow, V: ScalarField) -> np.ndarray:
    """Gradient of energy() over interior nodes, equal to -el_residual / (2(t-s)n)"""
    return -el_residual(path, window, V) / (2.0 * window.tau * path.n)


def residual_norm(path: PathDiscretization, window: TimeWindow, V: ScalarField) -> float:
    """Sup-norm of the discrete Euler-Lagrange residual"""
    residual = el_residual(path, window, V)
    return float(np.max(np.abs(residual))) if residual.size else 0.0


def geodesic_velocity(path: PathDiscretization, end: int = 1) -> np.ndarray:
    """
    Second-order one-sided estimate of d gamma / d tau at tau = 0 or tau = 1.

    Args:
        path: Discretised geodesic
        end: 0 for the start point y, 1 for the end point x
    """
    nodes = path.nodes
    n = path.n
    if end == 1:
        return n * (3.0 * nodes[-1] - 4.0 * nodes[-2] + nodes[-3]) / 2.0
    if end == 0:
        return n * (-3.0 * nodes[0] + 4.0 * nodes[1] - nodes[2]) / 2.0
    raise ValueError(f"end must be 0 or 1, got {end}")
