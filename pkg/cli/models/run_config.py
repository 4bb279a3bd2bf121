"""
Run configuration models
Validated experiment settings loaded from a JSON config file
"""

import json
from enum import Enum
from pathlib import Path
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class RunMode(str, Enum):
    """Subject of a verification run"""
    PDE = "pde"
    KERNEL = "kernel"


class OmegaSourceKind(str, Enum):
    """Where omega values come from"""
    CLOSED_HEAT = "closed_heat"
    CLOSED_QUADRATIC = "closed_quadratic"
    NUMERIC = "numeric"


class RatePairKind(str, Enum):
    """(A, beta) families"""
    HEAT = "heat"
    QUADRATIC = "quadratic"
    COMPARISON_AUTO = "comparison_auto"
    POWER = "power"


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class BoxConfig(StrictModel):
    """Working box as per-axis (lo, hi) extents"""
    extents: List[Tuple[float, float]]

    @field_validator("extents")
    @classmethod
    def check_extents(cls, value):
        if not value:
            raise ValueError("box needs at least one axis")
        for lo, hi in value:
            if not lo < hi:
                raise ValueError(f"empty extent [{lo}, {hi}]")
        return value


class RatePairConfig(StrictModel):
    """Rate pair selection; C for quadratic, exponent for power"""
    kind: RatePairKind = RatePairKind.HEAT
    C: Optional[float] = Field(None, gt=0)
    exponent: Optional[float] = None

    @model_validator(mode="after")
    def check_parameters(self):
        if self.kind == RatePairKind.QUADRATIC and self.C is None:
            raise ValueError("quadratic rate pair requires C")
        if self.kind == RatePairKind.POWER and self.exponent is None:
            raise ValueError("power rate pair requires exponent")
        return self


class QuadraticParams(StrictModel):
    """V = C1^2 |x - a|^2 + C2 for the closed-form action"""
    C1: float
    C2: float = 0.0
    a: Optional[List[float]] = None

    @field_validator("C1")
    @classmethod
    def check_c1(cls, value):
        if value == 0:
            raise ValueError("C1 must be non-zero")
        return value


class KernelConfig(StrictModel):
    """Closed-form subject for kernel mode"""
    kind: str = Field("heat", pattern="^(heat|mehler|ou_transformed)$")
    C1: float = 1.0
    C2: float = 0.0
    a: Optional[List[float]] = None


class GeodesicConfig(StrictModel):
    """Geodesic solver settings"""
    n: int = Field(200, ge=2)
    tol: float = Field(1e-8, gt=0)
    max_iter: int = Field(10_000, ge=1)
    method: str = Field("direct", pattern="^(direct|shooting|dp_oracle)$")
    refine: bool = True
    starts: int = Field(1, ge=1)


class SolverConfig(StrictModel):
    """Neumann box solver settings"""
    nx: int = Field(321, ge=16)
    dt: float = Field(1e-3, gt=0)
    t_end: float = Field(1.0, gt=0)
    snapshot_times: List[float] = Field(default_factory=lambda: [0.2, 0.5])
    scheme: Optional[str] = Field(None, pattern="^(crank_nicolson|backward_euler)$")

    @model_validator(mode="after")
    def check_times(self):
        times = self.snapshot_times
        if times != sorted(set(times)):
            raise ValueError("snapshot_times must be strictly increasing")
        if times and (times[0] <= 0 or times[-1] > self.t_end):
            raise ValueError(f"snapshot_times must lie in (0, {self.t_end}]")
        return self


class InitialDataConfig(StrictModel):
    """Initial data preset"""
    kind: str = Field("gaussian", pattern="^(gaussian|mehler_snapshot|constant|expression)$")
    center: Optional[List[float]] = None
    width: float = Field(1.0, gt=0)
    t0: float = Field(0.1, gt=0)
    C1: float = 1.0
    value: float = Field(1.0, gt=0)
    text: str = ""

    @model_validator(mode="after")
    def check_text(self):
        if self.kind == "expression" and not self.text:
            raise ValueError("expression initial data needs text")
        return self


class SamplerConfig(StrictModel):
    """Sampling for Harnack scans (count, exclusion) and condition checks (grid)"""
    count: int = Field(2000, ge=1)
    seed: int = 0
    margin_cells: int = Field(2, ge=0)
    delta_fraction: float = Field(0.05, ge=0)
    far_fraction: float = Field(0.8, ge=0)
    t_range: Tuple[float, float] = (0.1, 2.0)
    points_per_axis: int = Field(5, ge=2)
    max_samples: Optional[int] = Field(200, ge=1)
    sharpness_cases: int = Field(5, ge=0)

    @field_validator("t_range")
    @classmethod
    def check_t_range(cls, value):
        lo, hi = value
        if not 0 < lo < hi:
            raise ValueError(f"t_range must satisfy 0 < lo < hi, got {value}")
        return value


class ToleranceConfig(StrictModel):
    """Harnack scan tolerance and optional differential-Harnack violation threshold"""
    harnack: float = Field(1e-9, ge=0)
    differential: Optional[float] = Field(None, ge=0)


class BallConfig(StrictModel):
    """Ball for the V-convexity and boundary normal checks"""
    center: List[float]
    radius: float = Field(..., gt=0)


class NestedConfig(StrictModel):
    """Growing boxes for the stabilisation probe"""
    half_widths: List[float] = Field(default_factory=lambda: [4.0, 6.0, 8.0])
    spacing: float = Field(0.05, gt=0)
    probe_radius: float = Field(2.0, gt=0)
    quadruple_count: int = Field(100, ge=1)

    @field_validator("half_widths")
    @classmethod
    def check_widths(cls, value):
        if not value or any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("half_widths must be a non-empty increasing list")
        return value


class RunConfig(StrictModel):
    """One experiment: potential, domain, omega source, rate pair and sampling"""
    name: str = "run"
    mode: RunMode = RunMode.PDE
    potential: str = "0"
    drift: Optional[str] = None
    dim: int = Field(1, ge=1)
    box: BoxConfig
    rate_pair: RatePairConfig = Field(default_factory=RatePairConfig)
    omega_source: OmegaSourceKind = OmegaSourceKind.CLOSED_HEAT
    quadratic: Optional[QuadraticParams] = None
    kernel: Optional[KernelConfig] = None
    geodesic: GeodesicConfig = Field(default_factory=GeodesicConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    initial: InitialDataConfig = Field(default_factory=InitialDataConfig)
    sampler: SamplerConfig = Field(default_factory=SamplerConfig)
    tolerances: ToleranceConfig = Field(default_factory=ToleranceConfig)
    ball: Optional[BallConfig] = None
    nested: NestedConfig = Field(default_factory=NestedConfig)
    points: List[List[float]] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_consistency(self):
        if len(self.box.extents) != self.dim:
            raise ValueError(f"box has {len(self.box.extents)} axes but dim is {self.dim}")
        if self.omega_source == OmegaSourceKind.CLOSED_QUADRATIC and self.quadratic is None:
            raise ValueError("closed_quadratic omega requires quadratic params")
        if self.quadratic and self.quadratic.a is not None and len(self.quadratic.a) != self.dim:
            raise ValueError(f"quadratic centre has {len(self.quadratic.a)} coordinates, expected {self.dim}")
        if self.mode == RunMode.KERNEL:
            if self.omega_source == OmegaSourceKind.NUMERIC:
                raise ValueError("kernel mode requires a closed-form omega source")
            if self.kernel is None:
                raise ValueError("kernel mode requires a kernel section")
        if self.mode == RunMode.PDE and self.dim > 2:
            raise ValueError("pde mode supports dim 1 or 2")
        if self.ball is not None and len(self.ball.center) != self.dim:
            raise ValueError(f"ball centre has {len(self.ball.center)} coordinates, expected {self.dim}")
        for point in self.points:
            if len(point) != 2 * self.dim + 2:
                raise ValueError(f"points must be x, y, t, s with {2 * self.dim + 2} numbers, got {point}")
        return self

    @classmethod
    def from_file(cls, path: Path, overrides: Optional[dict] = None) -> "RunConfig":
        """Load a JSON config; non-None overrides replace top-level keys before validation"""
        with open(path, "r", encoding="utf-8") as handle:
            payload = json.load(handle)
        payload.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls.model_validate(payload)
