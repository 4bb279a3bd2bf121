"""
Quadruple Sampler
=================
Seeded (x, y, t, s) quadruples for Harnack scans: interior grid nodes and
snapshot times for PDE solutions, uniform box and time-range draws for
closed-form kernels.
"""

import hashlib
import json
import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from modules.pde import GridSolution

logger = logging.getLogger(__name__)


@dataclass
class SamplerConfig:
    """
    Sampling settings.

    Quadruples with t - s < delta_fraction * t AND |x - y| > far_fraction * radius
    are excluded; margin_cells keeps grid samples away from the faces.
    """
    count: int = 2000
    seed: int = 0
    margin_cells: int = 2
    delta_fraction: float = 0.05
    far_fraction: float = 0.8
    t_range: Tuple[float, float] = (0.1, 2.0)

    def __post_init__(self):
        if self.count < 1:
            raise ValueError(f"sample count must be >= 1, got {self.count}")
        lo, hi = self.t_range
        if not 0 < lo < hi:
            raise ValueError(f"time range must satisfy 0 < lo < hi, got {self.t_range}")
        self.t_range = (float(lo), float(hi))

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload['t_range'] = list(self.t_range)
        return payload


@dataclass(frozen=True)
class Quadruple:
    x: np.ndarray
    y: np.ndarray
    t: float
    s: float

    def as_tuple(self) -> Tuple:
        return (self.x.tolist(), self.y.tolist(), self.t, self.s)


def config_hash(payload: Dict[str, Any]) -> str:
    """sha256 of the canonical JSON form (sorted keys)"""
    text = json.dumps(payload, sort_keys=True, separators=(',', ':'), default=str)
    return hashlib.sha256(text.encode('utf-8')).hexdigest()


def box_radius(extents: Sequence[Tuple[float, float]]) -> float:
    return 0.5 * min(hi - lo for lo, hi in extents)


def is_excluded(x, y, t: float, s: float, radius: float, config: SamplerConfig) -> bool:
    """Short time span combined with a long jump, where e^{-omega} underflows"""
    close_in_time = (t - s) < config.delta_fraction * t
    far_apart = float(np.linalg.norm(np.asarray(x) - np.asarray(y))) > config.far_fraction * radius
    return close_in_time and far_apart


def make_quadruples(points: Sequence[Tuple]) -> List[Quadruple]:
    """Explicit (x, y, t, s) tuples"""
    quadruples = []
    for x, y, t, s in points:
        if not s < t:
            raise ValueError(f"quadruple needs s < t, got s={s}, t={t}")
        quadruples.append(Quadruple(np.atleast_1d(np.asarray(x, dtype=float)),
                                    np.atleast_1d(np.asarray(y, dtype=float)), float(t), float(s)))
    return quadruples


def sample_grid_quadruples(solution: GridSolution, config: SamplerConfig,
                           radius: Optional[float] = None) -> List[Quadruple]:
    """
    Interior nodes for x and y, distinct snapshot times for s < t.

    Raises:
        ValueError: Fewer than two snapshot times
    """
    times = solution.times
    if len(times) < 2:
        raise ValueError("grid scans need at least two snapshot times")
    grid = solution.grid
    margin = config.margin_cells
    if grid.nx - 2 * margin < 1:
        raise ValueError(f"margin of {margin} cells leaves no interior nodes")
    axes = grid.axes
    radius = box_radius(grid.extents) if radius is None else radius
    pairs = [(t, s) for i, t in enumerate(times) for s in times[:i]]

    rng = np.random.default_rng(config.seed)
    quadruples: List[Quadruple] = []
    attempts = 0
    while len(quadruples) < config.count:
        attempts += 1
        if attempts > 100 * config.count:
            raise ValueError("exclusion rule rejects almost every grid quadruple")
        ix = rng.integers(margin, grid.nx - margin, size=grid.d)
        iy = rng.integers(margin, grid.nx - margin, size=grid.d)
        t, s = pairs[int(rng.integers(len(pairs)))]
        x = np.array([axes[k][ix[k]] for k in range(grid.d)])
        y = np.array([axes[k][iy[k]] for k in range(grid.d)])
        if is_excluded(x, y, t, s, radius, config):
            continue
        quadruples.append(Quadruple(x, y, t, s))
    logger.info(f"sampled {len(quadruples)} grid quadruples over {len(pairs)} time pairs")
    return quadruples


def sample_kernel_quadruples(extents: Sequence[Tuple[float, float]],
                             config: SamplerConfig) -> List[Quadruple]:
    """Uniform x, y in the box and s < t uniform in the time range"""
    rng = np.random.default_rng(config.seed)
    lo = np.array([e[0] for e in extents], dtype=float)
    hi = np.array([e[1] for e in extents], dtype=float)
    radius = box_radius(extents)
    quadruples: List[Quadruple] = []
    while len(quadruples) < config.count:
        x = rng.uniform(lo, hi)
        y = rng.uniform(lo, hi)
        s, t = np.sort(rng.uniform(*config.t_range, size=2))
        if not s < t or is_excluded(x, y, t, s, radius, config):
            continue
        quadruples.append(Quadruple(x, y, float(t), float(s)))
    logger.info(f"sampled {len(quadruples)} kernel quadruples")
    return quadruples
