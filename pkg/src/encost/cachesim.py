"""Trace-driven simulation of private LRU caches.

Two machine models are simulated over a trace of (core, element address)
accesses:

* serial: one fully associative LRU cache services the whole trace in
  program order (``simulate_serial``);
* distributed: every core owns a private LRU cache and services only its own
  subsequence of the trace (``simulate_distributed``).

Addresses are abstract element indices; an access touches the cache line
``address // line_elements``. LRU stands in for the optimal replacement of
the idealized model: it is the standard constant-factor surrogate and is
computable online.

``check_miss_bound`` verifies that distributed misses never exceed
core_count times the misses of a serial run over the same trace, the bound
that lets a sequential cache analysis upper-bound the multicore one.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import InvalidArgumentError


@dataclass(frozen=True)
class CacheGeometry:
    """Fully associative cache of ``capacity_lines`` lines of ``line_elements`` each."""

    capacity_lines: int
    line_elements: int

    def __post_init__(self) -> None:
        if self.capacity_lines < 1:
            raise InvalidArgumentError("capacity_lines must be >= 1")
        if self.line_elements < 1:
            raise InvalidArgumentError("line_elements must be >= 1")

    @property
    def capacity_elements(self) -> int:
        return self.capacity_lines * self.line_elements


class MemoryTrace:
    """Ordered accesses (core_id, element address) for ``core_count`` cores."""

    __slots__ = ("core_ids", "addresses", "core_count")

    def __init__(self, core_ids: Iterable[int], addresses: Iterable[int], core_count: int):
        self.core_ids = np.asarray(core_ids, dtype=np.int64)
        self.addresses = np.asarray(addresses, dtype=np.int64)
        self.core_count = int(core_count)
        if self.core_ids.shape != self.addresses.shape or self.core_ids.ndim != 1:
            raise InvalidArgumentError("core_ids and addresses must be 1-d and equal length")
        if len(self.core_ids) == 0:
            raise InvalidArgumentError("trace must be non-empty")
        if self.core_count < 1:
            raise InvalidArgumentError("core_count must be >= 1")
        if len(self.core_ids):
            lo = int(self.core_ids.min())
            hi = int(self.core_ids.max())
            if lo < 0 or hi >= self.core_count:
                raise InvalidArgumentError(
                    f"core ids must lie in [0, {self.core_count}), found [{lo}, {hi}]"
                )
        if int(self.addresses.min()) < 0:
            raise InvalidArgumentError("addresses must be non-negative")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]], core_count: int) -> "MemoryTrace":
        cores, addrs = zip(*pairs) if pairs else ((), ())
        return cls(cores, addrs, core_count)

    def __len__(self) -> int:
        return len(self.addresses)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return zip(self.core_ids.tolist(), self.addresses.tolist())

    def line_ids(self, line_elements: int) -> np.ndarray:
        return self.addresses // line_elements


@dataclass(frozen=True)
class CacheStats:
    """Miss counts from one simulation run."""

    misses_total: int
    misses_per_core: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.misses_total != sum(self.misses_per_core):
            raise InvalidArgumentError("misses_total must equal sum(misses_per_core)")


def _lru_misses_attributed(
    cores: list[int], lines: list[int], core_count: int, capacity: int
) -> tuple[int, list[int]]:
    """Misses of one shared LRU cache, attributed to the accessing core."""
    cache: OrderedDict[int, None] = OrderedDict()
    per_core = [0] * core_count
    move = cache.move_to_end
    pop = cache.popitem
    misses = 0
    for core, line in zip(cores, lines):
        if line in cache:
            move(line)
        else:
            misses += 1
            per_core[core] += 1
            cache[line] = None
            if len(cache) > capacity:
                pop(last=False)
    return misses, per_core


def simulate_serial(
    trace: MemoryTrace, geom: CacheGeometry, *, serialize: bool = False
) -> CacheStats:
    """Misses of the whole trace through a single cache, in program order.

    For multicore traces, ``serialize=True`` must be passed explicitly: core
    ids are then ignored for caching (but misses are still attributed to the
    accessing core in ``misses_per_core``).
    """
    if trace.core_count > 1 and not serialize:
        raise InvalidArgumentError(
            "trace has multiple cores; pass serialize=True to run it through one cache"
        )
    lines = trace.line_ids(geom.line_elements).tolist()
    cores = trace.core_ids.tolist()
    misses, per_core = _lru_misses_attributed(
        cores, lines, trace.core_count, geom.capacity_lines
    )
    return CacheStats(misses_total=misses, misses_per_core=tuple(per_core))


def simulate_distributed(trace: MemoryTrace, geom: CacheGeometry) -> CacheStats:
    """Misses with one private cache per core, each seeing only its own accesses."""
    lines = trace.line_ids(geom.line_elements).tolist()
    cores = trace.core_ids.tolist()
    capacity = geom.capacity_lines
    caches: list[OrderedDict[int, None]] = [OrderedDict() for _ in range(trace.core_count)]
    per_core = [0] * trace.core_count
    for core, line in zip(cores, lines):
        cache = caches[core]
        if line in cache:
            cache.move_to_end(line)
        else:
            per_core[core] += 1
            cache[line] = None
            if len(cache) > capacity:
                cache.popitem(last=False)
    return CacheStats(misses_total=sum(per_core), misses_per_core=tuple(per_core))


@dataclass(frozen=True)
class MissBoundReport:
    """Distributed misses versus core_count times the serial misses."""

    distributed_misses: int
    serial_misses: int
    core_count: int
    holds: bool

    @property
    def serial_bound(self) -> int:
        return self.core_count * self.serial_misses

    @property
    def ratio(self) -> float:
        """distributed_misses / (core_count * serial_misses); the bound holds iff <= 1."""
        if self.serial_bound == 0:
            return 0.0 if self.distributed_misses == 0 else float("inf")
        return self.distributed_misses / self.serial_bound


def check_miss_bound(trace: MemoryTrace, geom: CacheGeometry) -> MissBoundReport:
    """Check distributed misses <= core_count * serial misses on one trace."""
    distributed = simulate_distributed(trace, geom).misses_total
    serial = simulate_serial(trace, geom, serialize=True).misses_total
    return MissBoundReport(
        distributed_misses=distributed,
        serial_misses=serial,
        core_count=trace.core_count,
        holds=distributed <= trace.core_count * serial,
    )


# ---------------------------------------------------------------------------
# Trace dump format: one access per line, "core_id address".
# ---------------------------------------------------------------------------


def dump_trace(trace: MemoryTrace) -> str:
    lines = [f"{c} {a}" for c, a in trace]
    return "\n".join(lines) + "\n"


def save_trace(trace: MemoryTrace, path: str | Path) -> None:
    Path(path).write_text(dump_trace(trace), encoding="utf-8")


def load_trace(path: str | Path, core_count: int | None = None) -> MemoryTrace:
    cores = []
    addrs = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InvalidArgumentError(f"{path}:{lineno}: expected 'core_id address'")
        cores.append(int(parts[0]))
        addrs.append(int(parts[1]))
    if core_count is None:
        core_count = max(cores) + 1 if cores else 1
    return MemoryTrace(cores, addrs, core_count)
