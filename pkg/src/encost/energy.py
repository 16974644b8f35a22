"""Energy estimation from (work, span, io) triples and platform parameters.

Total energy is the sum of three terms:

* dynamic compute energy  ``eps_op * work``
* dynamic memory energy   ``eps_io * io``
* static (leakage) energy ``static_power * execution_time``

Execution time is the larger of compute time and memory-access time, which
after substituting the per-event parameters reduces to

    static = max(pi_op * span, pi_io * io * span / work)

The first argument dominating means the algorithm is cpu-bound, the second
memory-bound. ``estimate`` picks the max automatically; the forced variants
pin one regime, which is how the SpMV (memory-bound) and matmul (cpu-bound)
comparisons are conventionally evaluated. A platform-independent variant
drops the parameters entirely and scores work + io + max(span, io*span/work).
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexity import (
    CPU_BOUND,
    MEMORY_BOUND,
    AlgorithmInput,
    AlgorithmModel,
    ComplexityTriple,
)
from .errors import InvalidArgumentError, UndefinedRatioError
from .platforms import NJ_PER_J, PlatformProfile


@dataclass(frozen=True)
class EnergyEstimate:
    """Energy terms in nanojoules plus the boundedness classification.

    ``compute_time_proxy`` and ``memory_time_proxy`` are the two candidate
    static terms (each proportional to a time); whichever is larger is the
    static energy under automatic classification. Ties classify as cpu-bound.
    """

    static_energy: float
    compute_energy: float
    memory_energy: float
    total: float
    boundedness: str  # CPU_BOUND | MEMORY_BOUND
    compute_time_proxy: float
    memory_time_proxy: float

    def __post_init__(self) -> None:
        if self.total != self.static_energy + self.compute_energy + self.memory_energy:
            raise InvalidArgumentError("total must equal the sum of its three terms")
        if self.boundedness not in (CPU_BOUND, MEMORY_BOUND):
            raise InvalidArgumentError(f"bad boundedness {self.boundedness!r}")


@dataclass(frozen=True)
class AbstractEnergy:
    """Platform-independent energy score (dimensionless operation count)."""

    value: float

    def __post_init__(self) -> None:
        if self.value < 0:
            raise InvalidArgumentError("value must be non-negative")


def _proxies(triple: ComplexityTriple, profile: PlatformProfile) -> tuple[float, float]:
    if triple.work == 0:
        raise UndefinedRatioError("span/work ratio undefined for zero work")
    compute = profile.pi_op * triple.span
    memory = profile.pi_io * triple.io * triple.span / triple.work
    return compute, memory


def _build(
    triple: ComplexityTriple,
    profile: PlatformProfile,
    static: float,
    boundedness: str,
    proxies: tuple[float, float],
) -> EnergyEstimate:
    compute_energy = profile.eps_op * triple.work
    memory_energy = profile.eps_io * triple.io
    return EnergyEstimate(
        static_energy=static,
        compute_energy=compute_energy,
        memory_energy=memory_energy,
        total=static + compute_energy + memory_energy,
        boundedness=boundedness,
        compute_time_proxy=proxies[0],
        memory_time_proxy=proxies[1],
    )


def estimate(triple: ComplexityTriple, profile: PlatformProfile) -> EnergyEstimate:
    """Estimate energy, classifying cpu- vs memory-bound automatically."""
    compute_proxy, memory_proxy = _proxies(triple, profile)
    if compute_proxy >= memory_proxy:
        return _build(triple, profile, compute_proxy, CPU_BOUND, (compute_proxy, memory_proxy))
    return _build(triple, profile, memory_proxy, MEMORY_BOUND, (compute_proxy, memory_proxy))


def estimate_cpu_bound(triple: ComplexityTriple, profile: PlatformProfile) -> EnergyEstimate:
    """Estimate energy with the static term pinned to pi_op * span."""
    proxies = _proxies(triple, profile)
    return _build(triple, profile, proxies[0], CPU_BOUND, proxies)


def estimate_memory_bound(triple: ComplexityTriple, profile: PlatformProfile) -> EnergyEstimate:
    """Estimate energy with the static term pinned to pi_io * io * span / work."""
    proxies = _proxies(triple, profile)
    return _build(triple, profile, proxies[1], MEMORY_BOUND, proxies)


def estimate_from_raw(triple: ComplexityTriple, profile: PlatformProfile) -> EnergyEstimate:
    """Estimate energy via the unreduced time formulation of the raw constants.

    Computes static power times max(compute time, memory time) in watt-seconds
    and converts to nJ. Requires ``profile.raw``; agrees with ``estimate`` to
    floating-point accuracy and exists as a cross-check of the reduction.
    """
    if profile.raw is None:
        raise InvalidArgumentError(f"profile {profile.name!r} carries no raw constants")
    if triple.work == 0:
        raise UndefinedRatioError("span/work ratio undefined for zero work")
    raw = profile.raw
    t_comp = triple.span * raw.cycles_per_op / raw.frequency
    t_mem = (triple.io * triple.span * raw.cycles_per_cacheline) / (triple.work * raw.frequency)
    static = raw.static_power * max(t_comp, t_mem) * NJ_PER_J
    boundedness = CPU_BOUND if t_comp >= t_mem else MEMORY_BOUND
    compute_energy = profile.eps_op * triple.work
    memory_energy = profile.eps_io * triple.io
    proxy_scale = raw.static_power * NJ_PER_J
    return EnergyEstimate(
        static_energy=static,
        compute_energy=compute_energy,
        memory_energy=memory_energy,
        total=static + compute_energy + memory_energy,
        boundedness=boundedness,
        compute_time_proxy=t_comp * proxy_scale,
        memory_time_proxy=t_mem * proxy_scale,
    )


def estimate_platform_independent(triple: ComplexityTriple) -> AbstractEnergy:
    """Score energy without platform parameters.

    value = work + io + max(span, io*span/work). Useful only for ranking
    algorithms on the same input.
    """
    if triple.work == 0:
        raise UndefinedRatioError("span/work ratio undefined for zero work")
    time_term = max(triple.span, triple.io * triple.span / triple.work)
    return AbstractEnergy(value=triple.work + triple.io + time_term)


_ESTIMATORS = {
    "auto": estimate,
    "cpu": estimate_cpu_bound,
    "memory": estimate_memory_bound,
}

BOUND_MODES = tuple(_ESTIMATORS)


def estimate_with_mode(
    triple: ComplexityTriple, profile: PlatformProfile, bound_mode: str = "auto"
) -> EnergyEstimate:
    try:
        estimator = _ESTIMATORS[bound_mode]
    except KeyError:
        raise InvalidArgumentError(
            f"bound_mode must be one of {BOUND_MODES}, got {bound_mode!r}"
        ) from None
    return estimator(triple, profile)


@dataclass(frozen=True)
class ComparisonResult:
    """Energy ratio of two algorithms on one input and platform."""

    ratio: float
    estimate_a: EnergyEstimate
    estimate_b: EnergyEstimate


def compare(
    model_a: AlgorithmModel,
    model_b: AlgorithmModel,
    inp: AlgorithmInput,
    profile: PlatformProfile,
    bound_mode: str = "auto",
) -> ComparisonResult:
    """Compute E_a / E_b for two models on the same input and platform."""
    est_a = estimate_with_mode(model_a.evaluate(inp, profile), profile, bound_mode)
    est_b = estimate_with_mode(model_b.evaluate(inp, profile), profile, bound_mode)
    if est_b.total == 0:
        raise UndefinedRatioError("denominator estimate is zero")
    return ComparisonResult(ratio=est_a.total / est_b.total, estimate_a=est_a, estimate_b=est_b)
