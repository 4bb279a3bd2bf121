"""
Sample Sets
===========
Tensor-grid samples (x, y, t, s) over box x box x time pairs, with
t - s bounded below so omega and its derivatives stay moderate.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_TIMES = (0.2, 0.5, 1.0, 2.0)
DEFAULT_S_FRACTIONS = (0.25, 0.5, 0.75)


@dataclass(frozen=True)
class Sample:
    x: np.ndarray
    y: np.ndarray
    t: float
    s: float

    def as_tuple(self) -> Tuple:
        return (self.x.tolist(), self.y.tolist(), self.t, self.s)


@dataclass(frozen=True)
class SampleSet:
    samples: Tuple[Sample, ...]
    dim: int

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    @classmethod
    def from_points(cls, points: Sequence[Tuple], dim: int) -> 'SampleSet':
        """Explicit samples given as (x, y, t, s) tuples"""
        samples = []
        for x, y, t, s in points:
            x = np.atleast_1d(np.asarray(x, dtype=float))
            y = np.atleast_1d(np.asarray(y, dtype=float))
            if x.shape != (dim,) or y.shape != (dim,):
                raise ValueError(f"sample points must have {dim} coordinates")
            if not 0 < s < t:
                raise ValueError(f"sample times require 0 < s < t, got s={s}, t={t}")
            samples.append(Sample(x, y, float(t), float(s)))
        return cls(tuple(samples), dim)


def build_sample_set(extents: Sequence[Tuple[float, float]], points_per_axis: int = 8,
                     times: Sequence[float] = DEFAULT_TIMES,
                     s_fractions: Sequence[float] = DEFAULT_S_FRACTIONS,
                     delta_min_fraction: float = 0.05, max_samples: Optional[int] = None,
                     seed: int = 0) -> SampleSet:
    """
    Tensor grid of samples.

    Args:
        extents: Per-axis (lo, hi) of the box
        points_per_axis: Grid points per spatial axis, for x and y alike
        times: End times t
        s_fractions: Start times as fractions of t
        delta_min_fraction: Keep only t - s >= delta_min_fraction * t
        max_samples: Seeded subsample size (None keeps everything)
        seed: Subsampling seed

    Returns:
        SampleSet in grid order
    """
    dim = len(extents)
    axes = [np.linspace(lo, hi, points_per_axis) for lo, hi in extents]
    mesh = np.meshgrid(*axes, indexing='ij')
    nodes = np.stack([m.ravel() for m in mesh], axis=-1)

    pairs: List[Tuple[float, float]] = []
    for t in times:
        for fraction in s_fractions:
            s = fraction * t
            if 0 < s < t and t - s >= delta_min_fraction * t:
                pairs.append((float(t), float(s)))

    count = nodes.shape[0]
    total = count * count * len(pairs)
    if max_samples is not None and total > max_samples:
        rng = np.random.default_rng(seed)
        flat = np.sort(rng.choice(total, size=max_samples, replace=False))
    else:
        flat = np.arange(total)

    samples = []
    for index in flat:
        pair_index, rest = divmod(int(index), count * count)
        ix, iy = divmod(rest, count)
        t, s = pairs[pair_index]
        samples.append(Sample(nodes[ix].copy(), nodes[iy].copy(), t, s))
    logger.info(f"built {len(samples)} samples from a {points_per_axis}-point grid per axis")
    return SampleSet(tuple(samples), dim)
