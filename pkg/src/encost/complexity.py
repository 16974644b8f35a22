"""Parametric (work, span, io) models for SpMV and dense matmul algorithms.

Five algorithm models are provided:

* ``csr`` -- compressed sparse row SpMV: streaming over nonzeros with random
  reads of the input vector.
* ``csc`` -- compressed sparse column SpMV: streaming over nonzeros with
  random updates of the output vector.
* ``csb`` -- compressed sparse blocks SpMV: beta x beta blocks whose nonzeros
  are stored in Z-Morton order, so in-block accesses stream.
* ``basic-matmul`` -- triple loop that rescans the right-hand matrix once per
  output row.
* ``co-matmul`` -- cache-oblivious divide-and-conquer matmul.

Asymptotic constants are fixed at 1, except matmul work which keeps its
conventional factor 2 (one multiply and one add per term). Logarithms are
base 2 and rounded up; fractional intermediates stay real and only the final
work/span/io counts are rounded up. Span formulas are upper bounds; they are
clamped into [1, work] since a critical path cannot exceed total work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Union

from .errors import (
    CacheGeometryError,
    CatalogFormatError,
    DegenerateInputError,
    InvalidArgumentError,
)
from .platforms import PlatformProfile

CPU_BOUND = "cpu-bound"
MEMORY_BOUND = "memory-bound"


def ceil_log2(x: float) -> int:
    """Smallest integer k with 2**k >= x; 0 for x <= 1."""
    if x <= 1:
        return 0
    if isinstance(x, int):
        return (x - 1).bit_length()
    return math.ceil(math.log2(x))


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True)
class SparseInput:
    """Descriptor of a sparse n x m matrix (statistics only, no values).

    ``max_nnz_per_row`` is optional because it is rarely published for
    benchmark matrices; models that need it fail loudly when it is absent.
    ``block_dim`` is the block size for blocked formats; when unset, models
    default it to ceil(sqrt(rows)).
    """

    name: str
    rows: int
    cols: int
    nonzeros: int
    max_nnz_per_col: int
    max_nnz_per_row: int | None = None
    block_dim: int | None = None

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise InvalidArgumentError("rows and cols must be >= 1")
        if self.nonzeros < 0:
            raise InvalidArgumentError("nonzeros must be >= 0")
        if self.nonzeros > self.rows * self.cols:
            raise InvalidArgumentError(
                f"nonzeros {self.nonzeros} exceeds rows*cols {self.rows * self.cols}"
            )
        if not 0 <= self.max_nnz_per_col <= self.rows:
            raise InvalidArgumentError(
                f"max_nnz_per_col {self.max_nnz_per_col} outside [0, rows={self.rows}]"
            )
        if self.max_nnz_per_row is not None and not 0 <= self.max_nnz_per_row <= self.cols:
            raise InvalidArgumentError(
                f"max_nnz_per_row {self.max_nnz_per_row} outside [0, cols={self.cols}]"
            )
        if self.block_dim is not None and not 1 <= self.block_dim <= self.rows:
            raise InvalidArgumentError(
                f"block_dim {self.block_dim} outside [1, rows={self.rows}]"
            )

    def effective_block_dim(self) -> int:
        if self.block_dim is not None:
            return self.block_dim
        return default_block_dim(self.rows)


def default_block_dim(rows: int) -> int:
    """Default block size ceil(sqrt(rows)), clamped to [1, rows]."""
    return min(max(1, math.isqrt(rows - 1) + 1 if rows > 1 else 1), rows)


@dataclass(frozen=True)
class DenseInput:
    """Dense matmul problem sizes: (n x m) times (m x p) into (n x p)."""

    n: int
    m: int
    p: int

    def __post_init__(self) -> None:
        if min(self.n, self.m, self.p) < 1:
            raise InvalidArgumentError("n, m, p must all be >= 1")

    @property
    def name(self) -> str:
        return f"{self.n}x{self.m}x{self.p}"


@dataclass(frozen=True)
class ComplexityTriple:
    """Work (total flops), span (critical-path flops), io (cache-line transfers)."""

    work: int
    span: int
    io: int

    def __post_init__(self) -> None:
        if not self.work >= self.span >= 1:
            raise InvalidArgumentError(
                f"need work >= span >= 1, got work={self.work}, span={self.span}"
            )
        if self.io < 0:
            raise InvalidArgumentError(f"io must be >= 0, got {self.io}")

    @property
    def parallelism(self) -> float:
        return self.work / self.span


def _clamp_span(span: int, work: int) -> int:
    return min(max(span, 1), work)


def _check_spmv_input(inp: SparseInput) -> None:
    if inp.rows < 2:
        raise DegenerateInputError(f"SpMV models require rows >= 2, got {inp.rows}")
    if inp.nonzeros < 1:
        raise DegenerateInputError("SpMV models require at least one nonzero")


def csr_complexity(inp: SparseInput) -> ComplexityTriple:
    """Row-compressed SpMV: work = nz, io = nz, span = nr + ceil(log2 n).

    Every nonzero performs a random read of the input vector, so I/O is one
    line per nonzero in the worst case. Needs ``max_nnz_per_row``.
    """
    _check_spmv_input(inp)
    if inp.max_nnz_per_row is None:
        raise InvalidArgumentError(
            f"input {inp.name!r} has no max_nnz_per_row; the csr model requires it"
        )
    span = inp.max_nnz_per_row + ceil_log2(inp.rows)
    return ComplexityTriple(
        work=inp.nonzeros, span=_clamp_span(span, inp.nonzeros), io=inp.nonzeros
    )


def csc_complexity(inp: SparseInput) -> ComplexityTriple:
    """Column-compressed SpMV: work = nz, io = nz, span = nc + ceil(log2 n).

    The random accesses hit the output vector instead of the input one;
    work and I/O match the row-compressed model.
    """
    _check_spmv_input(inp)
    span = inp.max_nnz_per_col + ceil_log2(inp.rows)
    return ComplexityTriple(
        work=inp.nonzeros, span=_clamp_span(span, inp.nonzeros), io=inp.nonzeros
    )


def csb_complexity(inp: SparseInput, cacheline_elements: int) -> ComplexityTriple:
    """Blocked SpMV with Z-Morton nonzero order inside beta x beta blocks.

    With nb = n/beta blocks per dimension (kept real):

    * work = nb^2 + nz          (block bookkeeping plus one flop per nonzero)
    * io   = nb^2 + nz/B        (in-block accesses stream at line granularity)
    * span = beta*ceil(log2 nb) + nb, floored at beta: a single block is
      processed serially along its dimension, so the span never drops below
      the block size.
    """
    _check_spmv_input(inp)
    if cacheline_elements < 1:
        raise InvalidArgumentError("cacheline_elements must be >= 1")
    beta = inp.effective_block_dim()
    nb = inp.rows / beta
    work = math.ceil(nb * nb + inp.nonzeros)
    io = math.ceil(nb * nb + inp.nonzeros / cacheline_elements)
    span = max(math.ceil(beta * ceil_log2(nb) + nb), beta)
    return ComplexityTriple(work=work, span=_clamp_span(span, work), io=io)


def basic_matmul_complexity(
    inp: DenseInput, cacheline_elements: int, core_count: int
) -> ComplexityTriple:
    """Triple-loop matmul over row-partitioned output.

    The right-hand m x p matrix is rescanned once per output row, so
    io = (nm + nmp + np)/B. Work 2nmp splits evenly over the cores:
    span = 2nmp/N.
    """
    if core_count < 1:
        raise InvalidArgumentError(f"core_count must be >= 1, got {core_count}")
    if cacheline_elements < 1:
        raise InvalidArgumentError("cacheline_elements must be >= 1")
    n, m, p = inp.n, inp.m, inp.p
    work = 2 * n * m * p
    span = _ceil_div(work, core_count)
    io = _ceil_div(n * m + n * m * p + n * p, cacheline_elements)
    return ComplexityTriple(work=work, span=span, io=io)


def co_matmul_complexity(
    inp: DenseInput,
    cacheline_elements: int,
    private_cache_elements: int,
    core_count: int,
) -> ComplexityTriple:
    """Cache-oblivious divide-and-conquer matmul.

    io = n + m + p + (nm + mp + np)/B + nmp/(B*sqrt(Z)); work and span match
    the basic algorithm. Requires Z >= B^2 (tall-cache style guard).
    """
    if core_count < 1:
        raise InvalidArgumentError(f"core_count must be >= 1, got {core_count}")
    if cacheline_elements < 1:
        raise InvalidArgumentError("cacheline_elements must be >= 1")
    if private_cache_elements < cacheline_elements * cacheline_elements:
        raise CacheGeometryError(
            f"private cache of {private_cache_elements} elements is smaller than "
            f"cacheline_elements^2 = {cacheline_elements ** 2}"
        )
    n, m, p = inp.n, inp.m, inp.p
    work = 2 * n * m * p
    span = _ceil_div(work, core_count)
    io_real = (
        n + m + p
        + (n * m + m * p + n * p) / cacheline_elements
        + (n * m * p) / (cacheline_elements * math.sqrt(private_cache_elements))
    )
    return ComplexityTriple(work=work, span=span, io=math.ceil(io_real))


# ---------------------------------------------------------------------------
# Model registry
# ---------------------------------------------------------------------------

AlgorithmInput = Union[SparseInput, DenseInput]


@dataclass(frozen=True)
class AlgorithmModel:
    """A named mapping from an input descriptor to a complexity triple.

    ``boundedness_hint`` records which energy regime the algorithm normally
    runs in (SpMV is memory-bound, matmul is cpu-bound); the energy module
    can override it per call.
    """

    name: str
    kind: str  # "sparse" | "dense"
    boundedness_hint: str  # MEMORY_BOUND | CPU_BOUND
    _evaluate: Callable[[AlgorithmInput, PlatformProfile], ComplexityTriple]

    def evaluate(self, inp: AlgorithmInput, profile: PlatformProfile) -> ComplexityTriple:
        expected = SparseInput if self.kind == "sparse" else DenseInput
        if not isinstance(inp, expected):
            raise InvalidArgumentError(
                f"model {self.name!r} expects a {self.kind} input, got {type(inp).__name__}"
            )
        return self._evaluate(inp, profile)


def _eval_csr(inp: SparseInput, profile: PlatformProfile) -> ComplexityTriple:
    return csr_complexity(inp)


def _eval_csc(inp: SparseInput, profile: PlatformProfile) -> ComplexityTriple:
    return csc_complexity(inp)


def _eval_csb(inp: SparseInput, profile: PlatformProfile) -> ComplexityTriple:
    return csb_complexity(inp, profile.cacheline_elements)


def _eval_basic_matmul(inp: DenseInput, profile: PlatformProfile) -> ComplexityTriple:
    return basic_matmul_complexity(
        inp, profile.cacheline_elements, profile.require_core_count()
    )


def _eval_co_matmul(inp: DenseInput, profile: PlatformProfile) -> ComplexityTriple:
    return co_matmul_complexity(
        inp,
        profile.cacheline_elements,
        profile.private_cache_elements,
        profile.require_core_count(),
    )


MODELS: dict[str, AlgorithmModel] = {
    m.name: m
    for m in (
        AlgorithmModel("csr", "sparse", MEMORY_BOUND, _eval_csr),
        AlgorithmModel("csc", "sparse", MEMORY_BOUND, _eval_csc),
        AlgorithmModel("csb", "sparse", MEMORY_BOUND, _eval_csb),
        AlgorithmModel("basic-matmul", "dense", CPU_BOUND, _eval_basic_matmul),
        AlgorithmModel("co-matmul", "dense", CPU_BOUND, _eval_co_matmul),
    )
}


def get_model(name: str) -> AlgorithmModel:
    try:
        return MODELS[name]
    except KeyError:
        from .errors import UnknownNameError

        raise UnknownNameError("algorithm", name, sorted(MODELS)) from None


# ---------------------------------------------------------------------------
# Built-in sparse matrix catalog
# ---------------------------------------------------------------------------

# (name, rows, cols, nonzeros, max_nnz_per_col) for nine widely used
# SuiteSparse benchmark matrices. Per-row maxima are not published for these,
# so the csr model cannot be driven from the catalog alone.
_MATRIX_ROWS: tuple[tuple[str, int, int, int, int], ...] = (
    ("bone010", 986703, 986703, 47851783, 63),
    ("kkt_power", 2063494, 2063494, 12771361, 90),
    ("ldoor", 952203, 952203, 42493817, 77),
    ("parabolic_fem", 525825, 525825, 3674625, 7),
    ("pds-100", 156243, 517577, 1096002, 7),
    ("rajat31", 4690002, 4690002, 20316253, 1200),
    ("Rucci1", 1977885, 109900, 7791168, 108),
    ("sme3Dc", 42930, 42930, 3148656, 405),
    ("torso1", 116158, 116158, 8516500, 1200),
)


def builtin_matrix_catalog() -> list[SparseInput]:
    """Return the 9 built-in sparse matrix descriptors."""
    return [
        SparseInput(name=name, rows=n, cols=m, nonzeros=nz, max_nnz_per_col=nc)
        for name, n, m, nz, nc in _MATRIX_ROWS
    ]


# Matrix catalog file format: one INI-style section per matrix.
#
#   [torso1]
#   rows = 116158
#   cols = 116158
#   nonzeros = 8516500
#   max_nnz_per_col = 1200
#   # optional: max_nnz_per_row, block_dim

_MATRIX_REQUIRED = ("rows", "cols", "nonzeros", "max_nnz_per_col")
_MATRIX_OPTIONAL = ("max_nnz_per_row", "block_dim")


def dump_matrix_catalog(matrices: list[SparseInput]) -> str:
    blocks = ["# encost sparse matrix catalog (counts of elements)"]
    for m in matrices:
        lines = [f"[{m.name}]"]
        lines.append(f"rows = {m.rows}")
        lines.append(f"cols = {m.cols}")
        lines.append(f"nonzeros = {m.nonzeros}")
        lines.append(f"max_nnz_per_col = {m.max_nnz_per_col}")
        if m.max_nnz_per_row is not None:
            lines.append(f"max_nnz_per_row = {m.max_nnz_per_row}")
        if m.block_dim is not None:
            lines.append(f"block_dim = {m.block_dim}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def parse_matrix_catalog(text: str, source: str = "<matrices>") -> list[SparseInput]:
    from .platforms import _parse_sections

    matrices = []
    for name, fields in _parse_sections(text, source):
        for key in fields:
            if key not in _MATRIX_REQUIRED and key not in _MATRIX_OPTIONAL:
                raise CatalogFormatError(f"{source}: [{name}]: unknown field {key!r}")
        for key in _MATRIX_REQUIRED:
            if key not in fields:
                raise CatalogFormatError(f"{source}: [{name}]: missing field {key!r}")

        def _int(key: str) -> int:
            try:
                return int(fields[key])
            except ValueError:
                raise CatalogFormatError(
                    f"{source}: [{name}]: field {key!r} is not an integer: {fields[key]!r}"
                ) from None

        try:
            matrices.append(
                SparseInput(
                    name=name,
                    rows=_int("rows"),
                    cols=_int("cols"),
                    nonzeros=_int("nonzeros"),
                    max_nnz_per_col=_int("max_nnz_per_col"),
                    max_nnz_per_row=_int("max_nnz_per_row") if "max_nnz_per_row" in fields else None,
                    block_dim=_int("block_dim") if "block_dim" in fields else None,
                )
            )
        except InvalidArgumentError as exc:
            raise CatalogFormatError(f"{source}: [{name}]: {exc}") from exc
    return matrices


def load_matrix_catalog(path: str | Path) -> list[SparseInput]:
    p = Path(path)
    return parse_matrix_catalog(p.read_text(encoding="utf-8"), source=str(p))


def with_block_dim(inp: SparseInput, block_dim: int) -> SparseInput:
    return replace(inp, block_dim=block_dim)
