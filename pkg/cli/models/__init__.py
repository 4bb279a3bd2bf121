# Models package
from .run_config import (
    BallConfig,
    BoxConfig,
    GeodesicConfig,
    InitialDataConfig,
    KernelConfig,
    NestedConfig,
    OmegaSourceKind,
    QuadraticParams,
    RatePairConfig,
    RatePairKind,
    RunConfig,
    RunMode,
    SamplerConfig,
    SolverConfig,
    ToleranceConfig,
)

__all__ = [
    "BallConfig",
    "BoxConfig",
    "GeodesicConfig",
    "InitialDataConfig",
    "KernelConfig",
    "NestedConfig",
    "OmegaSourceKind",
    "QuadraticParams",
    "RatePairConfig",
    "RatePairKind",
    "RunConfig",
    "RunMode",
    "SamplerConfig",
    "SolverConfig",
    "ToleranceConfig",
]
