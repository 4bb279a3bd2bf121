"""
Box Grids and Initial Data
==========================
Uniform node grids on boxes (d = 1 or 2) and the initial data presets fed
to the Neumann solver.
"""

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from modules.closedform import mehler_kernel
from modules.expr import PotentialExpr, differentiate, parse

logger = logging.getLogger(__name__)

MIN_POINTS_PER_AXIS = 16


@dataclass(frozen=True)
class BoxGrid:
    """
    Space-time discretisation of a box.

    extents are per-axis (lo, hi); nodes include both faces, so the spacing
    on axis i is (hi - lo) / (nx - 1).
    """
    d: int
    extents: Tuple[Tuple[float, float], ...]
    nx: int
    dt: float
    t_end: float
    snapshot_times: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError(f"grid dimension must be 1 or 2, got {self.d}")
        extents = tuple((float(lo), float(hi)) for lo, hi in self.extents)
        if len(extents) != self.d:
            raise ValueError(f"grid has dimension {self.d} but {len(extents)} extents")
        for lo, hi in extents:
            if not lo < hi:
                raise ValueError(f"empty extent [{lo}, {hi}]")
        if self.nx < MIN_POINTS_PER_AXIS:
            raise ValueError(f"nx must be >= {MIN_POINTS_PER_AXIS}, got {self.nx}")
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_end <= 0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        times = tuple(float(t) for t in self.snapshot_times)
        if list(times) != sorted(set(times)):
            raise ValueError("snapshot_times must be strictly increasing")
        if times and (times[0] <= 0 or times[-1] > self.t_end):
            raise ValueError(f"snapshot_times must lie in (0, {self.t_end}]")
        object.__setattr__(self, 'extents', extents)
        object.__setattr__(self, 'snapshot_times', times)

    @property
    def axes(self) -> List[np.ndarray]:
        return [np.linspace(lo, hi, self.nx) for lo, hi in self.extents]

    @property
    def spacing(self) -> Tuple[float, ...]:
        return tuple((hi - lo) / (self.nx - 1) for lo, hi in self.extents)

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.nx,) * self.d

    @property
    def output_times(self) -> Tuple[float, ...]:
        """Snapshot times plus t_end"""
        if self.snapshot_times and self.snapshot_times[-1] == self.t_end:
            return self.snapshot_times
        return self.snapshot_times + (float(self.t_end),)

    def nodes(self) -> np.ndarray:
        """All nodes, shape (nx^d, d), first axis slowest"""
        mesh = np.meshgrid(*self.axes, indexing='ij')
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def interior_mask(self, margin: int = 2) -> np.ndarray:
        """Boolean field that is False within margin cells of any face"""
        mask = np.zeros(self.shape, dtype=bool)
        inner = tuple(slice(margin, self.nx - margin) for _ in range(self.d))
        mask[inner] = True
        return mask

    def refined(self) -> 'BoxGrid':
        """Halve the spacing and the time step; every old node stays a node"""
        return replace(self, nx=2 * self.nx - 1, dt=self.dt / 2.0)

    @classmethod
    def uniform(cls, extents: Sequence[Tuple[float, float]], nx: int, dt: float,
                t_end: float, snapshot_times: Sequence[float] = ()) -> 'BoxGrid':
        return cls(len(extents), tuple(tuple(e) for e in extents), nx, dt, t_end, tuple(snapshot_times))


class InitialKind(str, Enum):
    GAUSSIAN = 'gaussian'
    MEHLER_SNAPSHOT = 'mehler_snapshot'
    CONSTANT = 'constant'
    EXPRESSION = 'expression'


@dataclass(frozen=True)
class InitialData:
    """
    Positive initial data u0.

    gaussian:        exp(-|x - center|^2 / (2 width^2))
    mehler_snapshot: Mehler kernel at time t0 with strength C1 (oracle aligned)
    constant:        value everywhere
    expression:      any potential-grammar expression in x1..xd
    """
    kind: InitialKind
    center: Optional[Tuple[float, ...]] = None
    width: float = 1.0
    t0: float = 0.1
    C1: float = 1.0
    value: float = 1.0
    text: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'kind', InitialKind(self.kind))
        if self.kind == InitialKind.GAUSSIAN and self.width <= 0:
            raise ValueError(f"gaussian width must be positive, got {self.width}")
        if self.kind == InitialKind.MEHLER_SNAPSHOT and (self.t0 <= 0 or self.C1 == 0):
            raise ValueError("mehler_snapshot needs t0 > 0 and C1 != 0")
        if self.kind == InitialKind.CONSTANT and self.value <= 0:
            raise ValueError(f"constant initial data must be positive, got {self.value}")
        if self.kind == InitialKind.EXPRESSION and not self.text:
            raise ValueError("expression initial data needs text")

    @classmethod
    def gaussian(cls, center: Sequence[float], width: float = 1.0) -> 'InitialData':
        return cls(InitialKind.GAUSSIAN, center=tuple(float(c) for c in center), width=float(width))

    @classmethod
    def mehler_snapshot(cls, t0: float, C1: float = 1.0) -> 'InitialData':
        return cls(InitialKind.MEHLER_SNAPSHOT, t0=float(t0), C1=float(C1))

    @classmethod
    def constant(cls, value: float = 1.0) -> 'InitialData':
        return cls(InitialKind.CONSTANT, value=float(value))

    @classmethod
    def expression(cls, text: str) -> 'InitialData':
        return cls(InitialKind.EXPRESSION, text=text)

    def potential_expr(self, dim: int) -> Optional[PotentialExpr]:
        return parse(self.text, dim) if self.kind == InitialKind.EXPRESSION else None

    def is_rough(self, dim: int) -> bool:
        """Expression data with a non-smooth primitive"""
        expr = self.potential_expr(dim)
        return expr is not None and not expr.is_c2

    def evaluate(self, nodes: np.ndarray) -> np.ndarray:
        """u0 at nodes of shape (n, d)"""
        nodes = np.asarray(nodes, dtype=float)
        dim = nodes.shape[-1]
        if self.kind == InitialKind.CONSTANT:
            return np.full(nodes.shape[:-1], self.value)
        if self.kind == InitialKind.GAUSSIAN:
            center = np.zeros(dim) if self.center is None else np.asarray(self.center, dtype=float)
            if center.shape != (dim,):
                raise ValueError(f"gaussian center has {center.size} coordinates, grid has {dim}")
            return np.exp(-np.sum((nodes - center) ** 2, axis=-1) / (2.0 * self.width ** 2))
        if self.kind == InitialKind.MEHLER_SNAPSHOT:
            return np.asarray(mehler_kernel(nodes, self.t0, dim, self.C1), dtype=float)
        return differentiate(self.potential_expr(dim)).value(nodes)
