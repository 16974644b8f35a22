"""Element-granularity access traces for the five kernels, plus random traces.

Traces are meant for desk-scale validation of the closed-form I/O counts:
generators accept only tiny instances (bounded by ``cap`` accesses,
default 2^20) and emit the exact access order of each algorithm:

* csr: nonzeros in row-major order; per nonzero a stream access to the
  nonzero record and a random read of x; one y write per nonempty row.
* csc: nonzeros in column-major order; one x read per nonempty column; per
  nonzero a stream access and a random update of y.
* csb: beta x beta blocks visited block-row by block-row; one block-pointer
  access per block cell; nonzeros inside a block in Z-Morton order, with the
  local x read and y update per nonzero.
* basic matmul: i-k-j loop order over a row partition of the output, so the
  right-hand matrix is rescanned once per output row.
* co matmul: divide-and-conquer order, splitting the largest dimension until
  the 1x1x1 base case.

Operand arrays live in disjoint, alignment-padded address regions so cache
lines never alias across arrays. Multicore traces split the outer work units
(rows, columns, block-rows, output rows) into contiguous chunks, one per core.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cachesim import MemoryTrace
from .errors import InvalidArgumentError, TraceTooLargeError

DEFAULT_TRACE_CAP = 2**20

# Region base addresses are multiples of this, so any line size that divides
# it keeps regions in disjoint cache lines.
REGION_ALIGN = 4096


def _check_cap(n_accesses: int, cap: int, what: str) -> None:
    if n_accesses > cap:
        raise TraceTooLargeError(
            f"{what} would emit {n_accesses} accesses, over the cap of {cap}"
        )


def _region_bases(*sizes: int) -> list[int]:
    bases = []
    offset = 0
    for size in sizes:
        bases.append(offset)
        offset += -(-size // REGION_ALIGN) * REGION_ALIGN
    return bases


def _chunk_owner_bounds(count: int, parts: int) -> list[int]:
    """Boundaries of `parts` contiguous chunks covering range(count)."""
    base = count // parts
    extra = count % parts
    bounds = [0]
    for i in range(parts):
        bounds.append(bounds[-1] + base + (1 if i < extra else 0))
    return bounds


def _owner_of(index: int, bounds: list[int]) -> int:
    # bounds is short (<= cores+1); linear scan is fine
    for core in range(len(bounds) - 1):
        if index < bounds[core + 1]:
            return core
    return len(bounds) - 2


@dataclass(frozen=True)
class SparseCoords:
    """A tiny sparse matrix given by explicit nonzero coordinates."""

    rows: int
    cols: int
    entries: tuple[tuple[int, int], ...]  # (row, col) pairs, unordered

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise InvalidArgumentError("rows and cols must be >= 1")
        if not self.entries:
            raise InvalidArgumentError("matrix must have at least one nonzero")
        for r, c in self.entries:
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise InvalidArgumentError(f"entry ({r}, {c}) out of bounds")

    @property
    def nnz(self) -> int:
        return len(self.entries)

    @classmethod
    def identity(cls, n: int) -> "SparseCoords":
        return cls(rows=n, cols=n, entries=tuple((i, i) for i in range(n)))

    @classmethod
    def random(cls, rows: int, cols: int, nnz: int, seed: int = 0) -> "SparseCoords":
        """Uniformly random set of nnz distinct coordinates (seeded)."""
        if nnz < 1 or nnz > rows * cols:
            raise InvalidArgumentError(f"nnz must lie in [1, {rows * cols}]")
        rng = np.random.default_rng(seed)
        flat = rng.choice(rows * cols, size=nnz, replace=False)
        flat.sort()
        return cls(rows=rows, cols=cols, entries=tuple((int(f) // cols, int(f) % cols) for f in flat))


# ---------------------------------------------------------------------------
# SpMV traces
# ---------------------------------------------------------------------------


def trace_csr(
    matrix: SparseCoords, core_count: int = 1, cap: int = DEFAULT_TRACE_CAP
) -> MemoryTrace:
    """Row-compressed SpMV access trace; rows split contiguously over cores."""
    by_row: dict[int, list[int]] = {}
    for r, c in matrix.entries:
        by_row.setdefault(r, []).append(c)
    n_accesses = 2 * matrix.nnz + len(by_row)
    _check_cap(n_accesses, cap, "csr trace")
    a_base, x_base, y_base = _region_bases(matrix.nnz, matrix.cols, matrix.rows)
    bounds = _chunk_owner_bounds(matrix.rows, core_count)
    cores: list[int] = []
    addrs: list[int] = []
    k = 0
    for r in range(matrix.rows):
        if r not in by_row:
            continue
        core = _owner_of(r, bounds)
        for c in sorted(by_row[r]):
            cores.append(core)
            addrs.append(a_base + k)
            cores.append(core)
            addrs.append(x_base + c)
            k += 1
        cores.append(core)
        addrs.append(y_base + r)
    return MemoryTrace(cores, addrs, core_count)


def trace_csc(
    matrix: SparseCoords, core_count: int = 1, cap: int = DEFAULT_TRACE_CAP
) -> MemoryTrace:
    """Column-compressed SpMV access trace; columns split contiguously over cores."""
    by_col: dict[int, list[int]] = {}
    for r, c in matrix.entries:
        by_col.setdefault(c, []).append(r)
    n_accesses = 2 * matrix.nnz + len(by_col)
    _check_cap(n_accesses, cap, "csc trace")
    a_base, x_base, y_base = _region_bases(matrix.nnz, matrix.cols, matrix.rows)
    bounds = _chunk_owner_bounds(matrix.cols, core_count)
    cores: list[int] = []
    addrs: list[int] = []
    k = 0
    for c in range(matrix.cols):
        if c not in by_col:
            continue
        core = _owner_of(c, bounds)
        cores.append(core)
        addrs.append(x_base + c)
        for r in sorted(by_col[c]):
            cores.append(core)
            addrs.append(a_base + k)
            cores.append(core)
            addrs.append(y_base + r)
            k += 1
    return MemoryTrace(cores, addrs, core_count)


def morton_key(row: int, col: int) -> int:
    """Z-order curve index of (row, col), row bits more significant."""
    return (_part1by1(row) << 1) | _part1by1(col)


def _part1by1(n: int) -> int:
    if n >= 1 << 16:
        raise InvalidArgumentError("morton_key supports coordinates below 2^16")
    n &= 0x0000FFFF
    n = (n | (n << 8)) & 0x00FF00FF
    n = (n | (n << 4)) & 0x0F0F0F0F
    n = (n | (n << 2)) & 0x33333333
    n = (n | (n << 1)) & 0x55555555
    return n


def trace_csb(
    matrix: SparseCoords,
    block_dim: int,
    core_count: int = 1,
    cap: int = DEFAULT_TRACE_CAP,
) -> MemoryTrace:
    """Blocked SpMV access trace with Z-Morton order inside each block.

    Emits one block-pointer access per block cell (the whole pointer grid is
    scanned, empty blocks included), then per nonzero the streamed record,
    the x read and the y update. Block-rows split contiguously over cores.
    """
    if not 1 <= block_dim <= matrix.rows:
        raise InvalidArgumentError(f"block_dim {block_dim} outside [1, rows={matrix.rows}]")
    nb_r = -(-matrix.rows // block_dim)
    nb_c = -(-matrix.cols // block_dim)
    n_accesses = nb_r * nb_c + 3 * matrix.nnz
    _check_cap(n_accesses, cap, "csb trace")

    blocks: dict[tuple[int, int], list[tuple[int, int, int]]] = {}
    for r, c in matrix.entries:
        key = (r // block_dim, c // block_dim)
        blocks.setdefault(key, []).append((morton_key(r % block_dim, c % block_dim), r, c))

    ptr_base, a_base, x_base, y_base = _region_bases(
        nb_r * nb_c, matrix.nnz, matrix.cols, matrix.rows
    )
    bounds = _chunk_owner_bounds(nb_r, core_count)
    cores: list[int] = []
    addrs: list[int] = []
    k = 0
    for bi in range(nb_r):
        core = _owner_of(bi, bounds)
        for bj in range(nb_c):
            cores.append(core)
            addrs.append(ptr_base + bi * nb_c + bj)
            for _, r, c in sorted(blocks.get((bi, bj), ())):
                cores.append(core)
                addrs.append(a_base + k)
                cores.append(core)
                addrs.append(x_base + c)
                cores.append(core)
                addrs.append(y_base + r)
                k += 1
    return MemoryTrace(cores, addrs, core_count)


# ---------------------------------------------------------------------------
# Matmul traces
# ---------------------------------------------------------------------------


def _matmul_bases(n: int, m: int, p: int) -> tuple[int, int, int]:
    a_base, b_base, c_base = _region_bases(n * m, m * p, n * p)
    return a_base, b_base, c_base


def trace_basic_matmul(
    n: int, m: int, p: int, core_count: int = 1, cap: int = DEFAULT_TRACE_CAP
) -> MemoryTrace:
    """Triple-loop matmul trace in i-k-j order; output rows split over cores."""
    if min(n, m, p) < 1:
        raise InvalidArgumentError("n, m, p must all be >= 1")
    _check_cap(3 * n * m * p, cap, "basic matmul trace")
    a_base, b_base, c_base = _matmul_bases(n, m, p)
    bounds = _chunk_owner_bounds(n, core_count)
    cores: list[int] = []
    addrs: list[int] = []
    for i in range(n):
        core = _owner_of(i, bounds)
        for k in range(m):
            a_addr = a_base + i * m + k
            b_row = b_base + k * p
            c_row = c_base + i * p
            for j in range(p):
                cores.append(core)
                addrs.append(a_addr)
                cores.append(core)
                addrs.append(b_row + j)
                cores.append(core)
                addrs.append(c_row + j)
    return MemoryTrace(cores, addrs, core_count)


def trace_co_matmul(
    n: int, m: int, p: int, core_count: int = 1, cap: int = DEFAULT_TRACE_CAP
) -> MemoryTrace:
    """Divide-and-conquer matmul trace; each core recurses over its row slice.

    The recursion halves the largest of the three extents (ties broken in
    n, m, p order) down to single multiply-adds.
    """
    if min(n, m, p) < 1:
        raise InvalidArgumentError("n, m, p must all be >= 1")
    _check_cap(3 * n * m * p, cap, "co matmul trace")
    a_base, b_base, c_base = _matmul_bases(n, m, p)
    bounds = _chunk_owner_bounds(n, core_count)
    cores: list[int] = []
    addrs: list[int] = []

    def recurse(core: int, i0: int, i1: int, k0: int, k1: int, j0: int, j1: int) -> None:
        di, dk, dj = i1 - i0, k1 - k0, j1 - j0
        if di == dk == dj == 1:
            cores.append(core)
            addrs.append(a_base + i0 * m + k0)
            cores.append(core)
            addrs.append(b_base + k0 * p + j0)
            cores.append(core)
            addrs.append(c_base + i0 * p + j0)
            return
        if di >= dk and di >= dj:
            mid = i0 + di // 2
            recurse(core, i0, mid, k0, k1, j0, j1)
            recurse(core, mid, i1, k0, k1, j0, j1)
        elif dk >= dj:
            mid = k0 + dk // 2
            recurse(core, i0, i1, k0, mid, j0, j1)
            recurse(core, i0, i1, mid, k1, j0, j1)
        else:
            mid = j0 + dj // 2
            recurse(core, i0, i1, k0, k1, j0, mid)
            recurse(core, i0, i1, k0, k1, mid, j1)

    for core in range(core_count):
        i0, i1 = bounds[core], bounds[core + 1]
        if i1 > i0:
            recurse(core, i0, i1, 0, m, 0, p)
    return MemoryTrace(cores, addrs, core_count)


# ---------------------------------------------------------------------------
# Random traces
# ---------------------------------------------------------------------------


def random_trace(
    core_count: int,
    length: int,
    address_space: int = 256,
    seed: int = 0,
    cap: int = DEFAULT_TRACE_CAP,
) -> MemoryTrace:
    """Uniformly random (core, address) trace, deterministic for a seed."""
    if core_count < 1:
        raise InvalidArgumentError("core_count must be >= 1")
    if length < 1:
        raise InvalidArgumentError("length must be >= 1")
    if address_space < 1:
        raise InvalidArgumentError("address_space must be >= 1")
    _check_cap(length, cap, "random trace")
    rng = np.random.default_rng(seed)
    cores = rng.integers(0, core_count, size=length)
    addrs = rng.integers(0, address_space, size=length)
    return MemoryTrace(cores, addrs, core_count)


def spmv_access_count(matrix: SparseCoords, kernel: str, block_dim: int | None = None) -> int:
    """Number of accesses the given SpMV kernel trace would emit."""
    if kernel == "csr":
        return 2 * matrix.nnz + len({r for r, _ in matrix.entries})
    if kernel == "csc":
        return 2 * matrix.nnz + len({c for _, c in matrix.entries})
    if kernel == "csb":
        beta = block_dim or max(1, math.isqrt(matrix.rows - 1) + 1 if matrix.rows > 1 else 1)
        nb_r = -(-matrix.rows // beta)
        nb_c = -(-matrix.cols // beta)
        return nb_r * nb_c + 3 * matrix.nnz
    raise InvalidArgumentError(f"unknown SpMV kernel {kernel!r}")
