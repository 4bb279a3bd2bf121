"""
Path Discretization
===================
Time windows and piecewise-linear curves on [0, 1] joining y to x.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class TimeWindow:
    """Pair (t, s) with 0 < s < t"""
    s: float
    t: float

    def __post_init__(self):
        if not (np.isfinite(self.s) and np.isfinite(self.t)):
            raise ValueError(f"time window must be finite, got s={self.s}, t={self.t}")
        if not 0 < self.s < self.t:
            raise ValueError(f"time window requires 0 < s < t, got s={self.s}, t={self.t}")

    @property
    def tau(self) -> float:
        """Window length t - s"""
        return self.t - self.s


class PathDiscretization:
    """
    Uniform piecewise-linear curve with nodes gamma(i/n), i = 0..n.

    nodes[0] is the start point y and nodes[n] the end point x. The node
    array is stored read-only; optimizers work on copies.
    """

    def __init__(self, nodes: np.ndarray):
        nodes = np.array(nodes, dtype=float)
        if nodes.ndim == 1:
            nodes = nodes[:, None]
        if nodes.ndim != 2:
            raise ValueError(f"path nodes must have shape (n+1, d), got {nodes.shape}")
        if nodes.shape[0] < 3:
            raise ValueError(f"a path needs n >= 2 segments, got {nodes.shape[0] - 1}")
        if not np.all(np.isfinite(nodes)):
            raise ValueError("path nodes must be finite")
        nodes.setflags(write=False)
        self.nodes = nodes

    @property
    def n(self) -> int:
        return self.nodes.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.nodes.shape[1]

    @property
    def start(self) -> np.ndarray:
        return self.nodes[0]

    @property
    def end(self) -> np.ndarray:
        return self.nodes[-1]

    @property
    def parameters(self) -> np.ndarray:
        """Uniform parameters tau_i = i/n"""
        return np.arange(self.n + 1) / self.n

    def with_interior(self, interior: np.ndarray) -> 'PathDiscretization':
        """New path with the same endpoints and the given interior nodes"""
        nodes = np.vstack([self.start[None, :], interior, self.end[None, :]])
        return PathDiscretization(nodes)

    def __repr__(self) -> str:
        return f"PathDiscretization(n={self.n}, d={self.dim}, y={self.start.tolist()}, x={self.end.tolist()})"


def as_point(value, dim: int = None) -> np.ndarray:
    """Coerce a scalar or sequence into a 1-D float point"""
    point = np.atleast_1d(np.asarray(value, dtype=float))
    if point.ndim != 1:
        raise ValueError(f"expected a point, got shape {point.shape}")
    if dim is not None and point.shape[0] != dim:
        raise ValueError(f"expected a point in R^{dim}, got {point.shape[0]} coordinates")
    return point


def straight_path(y: Sequence[float], x: Sequence[float], n: int) -> PathDiscretization:
    """Straight segment from y to x with n uniform pieces"""
    y, x = as_point(y), as_point(x)
    if y.shape != x.shape:
        raise ValueError(f"endpoints differ in dimension: {y.shape[0]} vs {x.shape[0]}")
    weights = (np.arange(n + 1) / n)[:, None]
    return PathDiscretization((1 - weights) * y[None, :] + weights * x[None, :])
