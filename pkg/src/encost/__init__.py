"""Analytical energy-cost modeling of multithreaded algorithms.

Estimates and compares the energy of parallel kernels from their work, span
and I/O complexity combined with per-platform energy parameters, and checks
the underlying I/O assumptions with a trace-driven private-cache simulator.
"""

from .cachesim import (
    CacheGeometry,
    CacheStats,
    MemoryTrace,
    MissBoundReport,
    check_miss_bound,
    simulate_distributed,
    simulate_serial,
)
from .complexity import (
    CPU_BOUND,
    MEMORY_BOUND,
    AlgorithmModel,
    ComplexityTriple,
    DenseInput,
    SparseInput,
    basic_matmul_complexity,
    builtin_matrix_catalog,
    co_matmul_complexity,
    csb_complexity,
    csc_complexity,
    csr_complexity,
    get_model,
)
from .energy import (
    AbstractEnergy,
    ComparisonResult,
    EnergyEstimate,
    compare,
    estimate,
    estimate_cpu_bound,
    estimate_memory_bound,
    estimate_platform_independent,
)
from .platforms import (
    MeasurementSample,
    ParameterFit,
    PlatformProfile,
    RawPlatformConstants,
    builtin_catalog,
    derive_energy_parameters,
    fit_parameters,
    from_roofline,
)

__version__ = "0.1.0"

__all__ = [
    "AbstractEnergy",
    "AlgorithmModel",
    "CacheGeometry",
    "CacheStats",
    "ComparisonResult",
    "ComplexityTriple",
    "CPU_BOUND",
    "DenseInput",
    "EnergyEstimate",
    "MEMORY_BOUND",
    "MeasurementSample",
    "MemoryTrace",
    "MissBoundReport",
    "ParameterFit",
    "PlatformProfile",
    "RawPlatformConstants",
    "SparseInput",
    "basic_matmul_complexity",
    "builtin_catalog",
    "builtin_matrix_catalog",
    "check_miss_bound",
    "co_matmul_complexity",
    "compare",
    "csb_complexity",
    "csc_complexity",
    "csr_complexity",
    "derive_energy_parameters",
    "estimate",
    "estimate_cpu_bound",
    "estimate_memory_bound",
    "estimate_platform_independent",
    "fit_parameters",
    "from_roofline",
    "get_model",
    "simulate_distributed",
    "simulate_serial",
]
