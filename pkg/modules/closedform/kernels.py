"""
Fundamental Solutions
=====================
Heat kernel, Mehler kernel and the Ornstein-Uhlenbeck solution built from
it. Values are computed in log space; sinh and tanh arguments above 30
switch to their asymptotic forms so large C1 * t stays finite.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

logger = logging.getLogger(__name__)

LOG_SPACE_THRESHOLD = 30.0


def log_sinh(z):
    """log(sinh z) for z >= 0, overflow-safe above LOG_SPACE_THRESHOLD"""
    z = np.asarray(z, dtype=float)
    small = np.minimum(z, LOG_SPACE_THRESHOLD)
    with np.errstate(divide='ignore'):
        direct = np.log(np.sinh(small))
        asymptotic = z - np.log(2.0) + np.log1p(-np.exp(-2.0 * z))
    result = np.where(z > LOG_SPACE_THRESHOLD, asymptotic, direct)
    return float(result) if result.ndim == 0 else result


def coth(z):
    """Hyperbolic cotangent, z > 0"""
    z = np.asarray(z, dtype=float)
    result = 1.0 / np.tanh(z)
    return float(result) if result.ndim == 0 else result


def _squared_norm(x, d: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x[None]
    if x.shape[-1] != d:
        if d == 1:
            x = x[..., None]
        else:
            raise ValueError(f"expected points with trailing dimension {d}, got shape {x.shape}")
    return np.sum(x * x, axis=-1)


def _check_time(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise ValueError(f"kernel time must be positive, got {t}")
    return t


def _finish(value: np.ndarray):
    return float(value) if np.ndim(value) == 0 else value


def log_heat_kernel(x, t, d: int):
    """log of (4 pi t)^(-d/2) exp(-|x|^2 / (4t))"""
    t = _check_time(t)
    return _finish(-0.5 * d * np.log(4.0 * np.pi * t) - _squared_norm(x, d) / (4.0 * t))


def heat_kernel(x, t, d: int):
    """
    Fundamental solution of the heat equation on R^d.

    Args:
        x: Point(s), trailing axis of length d (scalars allowed for d = 1)
        t: Time > 0
        d: Dimension

    Returns:
        (4 pi t)^(-d/2) exp(-|x|^2 / (4t))
    """
    return _finish(np.exp(log_heat_kernel(x, t, d)))


def log_mehler_kernel(x, t, d: int, C1: float):
    """log of (2 pi sinh(2 C1 t) / C1)^(-d/2) exp(-C1 |x|^2 / (2 tanh(2 C1 t)))"""
    if C1 == 0:
        raise ValueError("Mehler kernel requires C1 != 0")
    t = _check_time(t)
    c = abs(C1)
    z = 2.0 * c * t
    normalisation = -0.5 * d * (np.log(2.0 * np.pi) + log_sinh(z) - np.log(c))
    return _finish(normalisation - c * _squared_norm(x, d) / (2.0 * np.tanh(z)))


def mehler_kernel(x, t, d: int, C1: float):
    """
    Fundamental solution of du/dt = Laplacian u - C1^2 |x|^2 u.

    Args:
        x: Point(s)
        t: Time > 0
        d: Dimension
        C1: Potential strength, non-zero

    Returns:
        Kernel value
    """
    return _finish(np.exp(log_mehler_kernel(x, t, d, C1)))


class KernelKind(str, Enum):
    """Closed-form positive solutions"""
    HEAT = 'heat'
    MEHLER = 'mehler'
    OU_TRANSFORMED = 'ou_transformed'


@dataclass(frozen=True)
class KernelSpec:
    """
    Closed-form positive solution used as a Harnack test subject.

    heat:           Gamma(x - a, t) for V = 0
    mehler:         Gamma_C1(x - a, t) exp(-C2 t) for V = C1^2 |x - a|^2 + C2
    ou_transformed: exp(-C2 |x|^2 / 2 - d C2 t) Gamma_C(x, t), C^2 = C1^2 + C2^2,
                    a solution of the drift equation with f = -(C2/2)|x|^2
                    and V = C1^2 |x|^2
    """
    kind: KernelKind
    d: int = 1
    C1: float = 1.0
    C2: float = 0.0
    a: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, 'kind', KernelKind(self.kind))
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        if self.a is not None:
            centre = tuple(float(v) for v in np.atleast_1d(self.a))
            if len(centre) != self.d:
                raise ValueError(f"centre a has {len(centre)} coordinates, expected {self.d}")
            object.__setattr__(self, 'a', centre)
        if self.kind == KernelKind.MEHLER and self.C1 == 0:
            raise ValueError("Mehler kernel requires C1 != 0")
        if self.kind == KernelKind.OU_TRANSFORMED:
            if self.C == 0:
                raise ValueError("OU kernel requires C1^2 + C2^2 > 0")
            if self.a is not None and any(self.a):
                raise ValueError("OU kernel is centred at the origin")

    @property
    def C(self) -> float:
        """sqrt(C1^2 + C2^2)"""
        return float(np.hypot(self.C1, self.C2))

    @property
    def centre(self) -> np.ndarray:
        return np.zeros(self.d) if self.a is None else np.array(self.a)

    def _offset(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 0 or (self.d == 1 and x.shape[-1:] != (1,)):
            x = x[..., None]
        return x - self.centre

    def log_value(self, x, t):
        """log u(x, t)"""
        offset = self._offset(x)
        if self.kind == KernelKind.HEAT:
            return log_heat_kernel(offset, t, self.d)
        if self.kind == KernelKind.MEHLER:
            return _finish(log_mehler_kernel(offset, t, self.d, self.C1) - self.C2 * np.asarray(t, dtype=float))
        drift = -0.5 * self.C2 * _squared_norm(offset, self.d) - self.d * self.C2 * np.asarray(t, dtype=float)
        return _finish(drift + log_mehler_kernel(offset, t, self.d, self.C))

    def value(self, x, t):
        """u(x, t)"""
        return _finish(np.exp(self.log_value(x, t)))

    def log_laplacian(self, x, t):
        """Laplacian of log u at (x, t); independent of x for these kernels"""
        t = _check_time(t)
        shape = np.shape(_squared_norm(self._offset(x), self.d))
        if self.kind == KernelKind.HEAT:
            value = -self.d / (2.0 * t)
        elif self.kind == KernelKind.MEHLER:
            value = -self.d * abs(self.C1) * coth(2.0 * abs(self.C1) * t)
        else:
            value = -self.d * self.C2 - self.d * self.C * coth(2.0 * self.C * t)
        return _finish(np.broadcast_to(value, np.broadcast_shapes(shape, np.shape(t))).copy())

    def characteristic_y(self, x, t: float, s: float) -> np.ndarray:
        """Start point y on the equality set for end point x and times s < t"""
        offset = self._offset(x)
        if self.kind == KernelKind.HEAT:
            factor = s / t
        else:
            c = abs(self.C1) if self.kind == KernelKind.MEHLER else self.C
            factor = float(np.exp(log_sinh(2.0 * c * s) - log_sinh(2.0 * c * t)))
        return self.centre + factor * offset
