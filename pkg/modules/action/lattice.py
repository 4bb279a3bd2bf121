"""
Lattice Oracle
==============
Brute-force minimisation of the discrete action over piecewise-linear
lattice paths in one dimension. Independent of the geodesic solver and
used to cross-check it.
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from modules.expr import ScalarField

from .path import TimeWindow, as_point

logger = logging.getLogger(__name__)


class LatticeError(ValueError):
    """Raised for unsupported dimensions or endpoints off the lattice"""


@dataclass(frozen=True)
class LatticeSpec:
    """m equally spaced space points on [lo, hi] and k time slices"""
    lo: float
    hi: float
    m: int = 801
    k: int = 20

    def __post_init__(self):
        if self.m < 3:
            raise ValueError(f"lattice needs m >= 3 space points, got {self.m}")
        if self.k < 2:
            raise ValueError(f"lattice needs k >= 2 time slices, got {self.k}")
        if not self.hi > self.lo:
            raise ValueError(f"lattice range must satisfy lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.m)

    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / (self.m - 1)

    def index_of(self, value: float) -> int:
        """Lattice index of value, raising LatticeError when it is off-lattice"""
        j = int(round((value - self.lo) / self.spacing))
        if 0 <= j < self.m and abs(self.points[j] - value) <= 1e-9 * (self.hi - self.lo):
            return j
        raise LatticeError(f"endpoint {value} is not on the lattice [{self.lo}, {self.hi}] with m={self.m}")


def aligned_lattice(y: float, x: float, k: int = 20, spacing: float = 0.005,
                    margin: float = 2.0) -> LatticeSpec:
    """Lattice containing both y and x, extended by margin on each side"""
    gap = abs(x - y)
    h = spacing if gap == 0 else gap / math.ceil(gap / spacing)
    pad = h * math.ceil(margin / h)
    lo = min(x, y) - pad
    hi = max(x, y) + pad
    m = int(round((hi - lo) / h)) + 1
    return LatticeSpec(lo=lo, hi=hi, m=m, k=k)


def lattice_geodesic(y, x, window: TimeWindow, V: ScalarField,
                     lattice: LatticeSpec) -> Tuple[float, np.ndarray]:
    """
    Dynamic program over lattice paths with k layers.

    Layer cost from p to p' is (p' - p)^2 k / (4(t-s)) + ((t-s)/k)(V(p) + V(p'))/2.
    Runs in O(k m^2).

    Returns:
        (minimal total cost, optimal nodes of shape (k+1, 1))
    """
    if V.dim != 1:
        raise LatticeError(f"lattice oracle supports d=1 only, got d={V.dim}")
    y_value = float(as_point(y, 1)[0])
    x_value = float(as_point(x, 1)[0])
    start = lattice.index_of(y_value)
    finish = lattice.index_of(x_value)

    points = lattice.points
    k = lattice.k
    tau = window.tau
    potential = V.value(points[:, None])
    transition = (k / (4.0 * tau)) * (points[None, :] - points[:, None]) ** 2 \
        + (tau / (2.0 * k)) * (potential[:, None] + potential[None, :])

    cost = np.full(lattice.m, np.inf)
    cost[start] = 0.0
    columns = np.arange(lattice.m)
    back = np.empty((k, lattice.m), dtype=np.int64)
    for layer in range(k):
        total = cost[:, None] + transition
        back[layer] = np.argmin(total, axis=0)
        cost = total[back[layer], columns]

    indices = [finish]
    for layer in range(k - 1, -1, -1):
        indices.append(int(back[layer][indices[-1]]))
    indices.reverse()

    nodes = points[indices][:, None].copy()
    nodes[0, 0] = y_value
    nodes[-1, 0] = x_value
    omega = float(cost[finish])
    logger.debug(f"lattice oracle m={lattice.m} k={k}: omega={omega:.12g}")
    return omega, nodes


def omega_oracle_dp(y, x, window: TimeWindow, V: ScalarField, lattice: LatticeSpec) -> float:
    """Minimal lattice action between y and x (d = 1)"""
    return lattice_geodesic(y, x, window, V, lattice)[0]
