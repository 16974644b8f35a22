"""Command-line interface.

Subcommands:

* ``platforms``            list (and optionally export) the platform catalog
* ``estimate``             energy of one algorithm on one input and platform
* ``compare``              pairwise energy-ratio sweep with CSV and chart output
* ``validate-miss-bound``  distributed-vs-serial cache miss bound on random traces
* ``validate-io``          closed-form I/O counts vs simulated miss counts

Exit codes: 0 success, 2 argument or name-resolution errors, 3 validation
failures. All randomized commands are deterministic for a fixed ``--seed``,
and CSV outputs are byte-identical across repeated runs.
"""

from __future__ import annotations

import argparse
import difflib
import sys
from dataclasses import dataclass
from pathlib import Path

from . import cachesim, complexity, energy, platforms, traces
from .errors import EncostError, InvalidArgumentError, UnknownNameError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3

# Default cache geometry used when simulating kernels against the closed
# forms. The closed forms assume caches smaller than the randomly accessed
# data: small caches for the vector kernels, and for matmul a cache capped at
# half the right-hand matrix footprint (so it really is rescanned per row).
SPMV_VALIDATION_GEOMETRY = cachesim.CacheGeometry(capacity_lines=4, line_elements=8)
MATMUL_VALIDATION_MAX_LINES = 64


IO_RATIO_WINDOW = (0.25, 4.0)
DEFAULT_VALIDATION_DENSITY = 0.2


def dense_validation_geometry(
    dense: complexity.DenseInput, line_elements: int = 8
) -> cachesim.CacheGeometry:
    half_b_matrix = dense.m * dense.p // (2 * line_elements)
    capacity = min(MATMUL_VALIDATION_MAX_LINES, max(line_elements, half_b_matrix))
    return cachesim.CacheGeometry(capacity_lines=capacity, line_elements=line_elements)


@dataclass(frozen=True)
class SweepSpec:
    """A comparison sweep: two algorithms over inputs x platforms."""

    algorithms: tuple[str, ...]
    inputs: tuple[str, ...]
    platforms: tuple[str, ...]
    bound_mode: str = "auto"

    def __post_init__(self) -> None:
        if not self.algorithms or not self.inputs or not self.platforms:
            raise InvalidArgumentError("algorithms, inputs and platforms must be non-empty")
        if self.bound_mode not in energy.BOUND_MODES:
            raise InvalidArgumentError(
                f"bound_mode must be one of {energy.BOUND_MODES}, got {self.bound_mode!r}"
            )


@dataclass(frozen=True)
class ComparisonRow:
    """One cell of a comparison sweep."""

    input_name: str
    platform_name: str
    energy_a: float  # nJ
    energy_b: float  # nJ
    ratio: float
    boundedness: str

    def __post_init__(self) -> None:
        if self.ratio != self.energy_a / self.energy_b:
            raise InvalidArgumentError("ratio must equal energy_a / energy_b")


def _normalize(name: str) -> str:
    return "".join(ch for ch in name.lower() if ch.isalnum())


def _resolve(kind: str, name: str, candidates: dict[str, object]):
    """Resolve a user-supplied name against display names, with suggestions."""
    if name in candidates:
        return candidates[name]
    by_norm = {_normalize(k): v for k, v in candidates.items()}
    norm = _normalize(name)
    if norm in by_norm:
        return by_norm[norm]
    suggestions = difflib.get_close_matches(name, list(candidates), n=3, cutoff=0.4)
    raise UnknownNameError(kind, name, suggestions or sorted(candidates)[:3])


def _load_platforms(path: str | None) -> dict[str, platforms.PlatformProfile]:
    profiles = platforms.builtin_catalog()
    if path:
        profiles = profiles + platforms.load_catalog(path)
    return {p.name: p for p in profiles}


def _load_matrices(path: str | None) -> dict[str, complexity.SparseInput]:
    mats = complexity.builtin_matrix_catalog()
    if path:
        mats = mats + complexity.load_matrix_catalog(path)
    return {m.name: m for m in mats}


def _parse_dense(token: str) -> complexity.DenseInput:
    parts = token.lower().split("x")
    try:
        dims = [int(p) for p in parts]
    except ValueError:
        raise InvalidArgumentError(
            f"dense size must look like '1024' or '1024x512x256', got {token!r}"
        ) from None
    if len(dims) == 1:
        dims = dims * 3
    if len(dims) != 3:
        raise InvalidArgumentError(f"dense size needs 1 or 3 extents, got {token!r}")
    return complexity.DenseInput(*dims)


def _resolve_input(
    token: str, kind: str, matrices: dict[str, complexity.SparseInput]
) -> complexity.AlgorithmInput:
    if kind == "sparse":
        return _resolve("matrix", token, matrices)
    return _parse_dense(token)


# ---------------------------------------------------------------------------
# platforms
# ---------------------------------------------------------------------------


def cmd_platforms(args: argparse.Namespace) -> int:
    profiles = list(_load_platforms(args.platforms_file).values())
    header = (
        f"{'platform':<22} {'processor':<22} {'eps_op':>8} {'eps_io':>8} "
        f"{'pi_op':>8} {'pi_io':>8} {'B':>4} {'Z':>7} {'cores':>6}"
    )
    print(header)
    print("-" * len(header))
    for p in profiles:
        cores = str(p.core_count) if p.core_count is not None else "-"
        print(
            f"{p.name:<22} {p.processor:<22} {p.eps_op:>8.3f} {p.eps_io:>8.2f} "
            f"{p.pi_op:>8.3f} {p.pi_io:>8.2f} {p.cacheline_elements:>4} "
            f"{p.private_cache_elements:>7} {cores:>6}"
        )
    print(f"{len(profiles)} platforms (energies in nJ, cache sizes in elements)")
    if args.export:
        Path(args.export).write_text(platforms.dump_catalog(profiles), encoding="utf-8")
        print(f"catalog written to {args.export}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# estimate
# ---------------------------------------------------------------------------


def cmd_estimate(args: argparse.Namespace) -> int:
    model = complexity.get_model(args.algorithm)
    profile = _resolve("platform", args.platform, _load_platforms(args.platforms_file))
    inp = _resolve_input(args.input, model.kind, _load_matrices(args.matrices_file))
    if args.block_dim is not None and isinstance(inp, complexity.SparseInput):
        inp = complexity.with_block_dim(inp, args.block_dim)
    triple = model.evaluate(inp, profile)
    est = energy.estimate_with_mode(triple, profile, args.bound_mode)
    print(f"algorithm: {model.name}")
    print(f"input:     {inp.name} ({model.kind})")
    print(f"platform:  {profile.name} ({profile.processor})")
    print(f"bound mode: {args.bound_mode}")
    print(f"work = {triple.work} flops, span = {triple.span} flops, io = {triple.io} lines")
    print(f"compute energy = {est.compute_energy:.6e} nJ")
    print(f"memory energy  = {est.memory_energy:.6e} nJ")
    print(f"static energy  = {est.static_energy:.6e} nJ")
    print(f"total          = {est.total:.6e} nJ")
    print(f"boundedness: {est.boundedness}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------


def run_comparison(
    spec: SweepSpec,
    platform_catalog: dict[str, platforms.PlatformProfile],
    matrix_catalog: dict[str, complexity.SparseInput],
    block_dim: int | None = None,
) -> list[ComparisonRow]:
    """Evaluate a two-algorithm sweep; rows sorted by input then platform."""
    if len(spec.algorithms) != 2:
        raise InvalidArgumentError("comparison sweeps take exactly two algorithms")
    model_a = complexity.get_model(spec.algorithms[0])
    model_b = complexity.get_model(spec.algorithms[1])
    if model_a.kind != model_b.kind:
        raise InvalidArgumentError(
            f"cannot compare a {model_a.kind} model with a {model_b.kind} model"
        )
    rows = []
    for token in spec.inputs:
        inp = _resolve_input(token, model_a.kind, matrix_catalog)
        if block_dim is not None and isinstance(inp, complexity.SparseInput):
            inp = complexity.with_block_dim(inp, block_dim)
        for pname in spec.platforms:
            profile = _resolve("platform", pname, platform_catalog)
            result = energy.compare(model_a, model_b, inp, profile, spec.bound_mode)
            ba = result.estimate_a.boundedness
            bb = result.estimate_b.boundedness
            rows.append(
                ComparisonRow(
                    input_name=inp.name,
                    platform_name=profile.name,
                    energy_a=result.estimate_a.total,
                    energy_b=result.estimate_b.total,
                    ratio=result.ratio,
                    boundedness=ba if ba == bb else f"{ba}/{bb}",
                )
            )
    rows.sort(key=lambda r: (r.input_name, r.platform_name))
    return rows


def comparison_csv(rows: list[ComparisonRow]) -> str:
    """Render rows as CSV, byte-stable across runs."""
    out = ["input,platform,energy_a_nJ,energy_b_nJ,ratio,boundedness"]
    for r in rows:
        out.append(
            f"{r.input_name},{r.platform_name},{r.energy_a!r},{r.energy_b!r},"
            f"{r.ratio:.4g},{r.boundedness}"
        )
    return "\n".join(out) + "\n"


def write_ratio_chart(
    rows: list[ComparisonRow], path: str | Path, label_a: str, label_b: str
) -> None:
    """Bar chart of energy ratios, one bar per input, reference line at 1."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    inputs = sorted({r.input_name for r in rows})
    plats = sorted({r.platform_name for r in rows})
    by_cell = {(r.input_name, r.platform_name): r.ratio for r in rows}
    width = 0.8 / max(1, len(plats))
    fig, ax = plt.subplots(figsize=(max(6.0, 1.1 * len(inputs)), 4.0))
    for k, plat in enumerate(plats):
        xs = [i + k * width for i in range(len(inputs))]
        ys = [by_cell.get((inp, plat), float("nan")) for inp in inputs]
        ax.bar(xs, ys, width=width, label=plat)
    ax.axhline(1.0, color="black", linewidth=1.0, linestyle="--")
    ax.set_xticks([i + 0.4 - width / 2 for i in range(len(inputs))])
    ax.set_xticklabels(inputs, rotation=30, ha="right")
    ax.set_ylabel(f"energy ratio {label_a} / {label_b}")
    ax.legend()
    fig.tight_layout()
    path = Path(path)
    metadata = {"Date": None} if path.suffix == ".svg" else None
    fig.savefig(path, metadata=metadata)
    plt.close(fig)


def cmd_compare(args: argparse.Namespace) -> int:
    platform_catalog = _load_platforms(args.platforms_file)
    matrix_catalog = _load_matrices(args.matrices_file)
    model_a = complexity.get_model(args.algorithm_a)
    if args.inputs:
        inputs = tuple(tok for tok in args.inputs.split(",") if tok)
    elif model_a.kind == "sparse":
        inputs = tuple(m.name for m in complexity.builtin_matrix_catalog())
    else:
        raise InvalidArgumentError("dense comparisons need --inputs with size triples")
    spec = SweepSpec(
        algorithms=(args.algorithm_a, args.algorithm_b),
        inputs=inputs,
        platforms=tuple(tok for tok in args.platforms.split(",") if tok),
        bound_mode=args.bound_mode,
    )
    rows = run_comparison(spec, platform_catalog, matrix_catalog, block_dim=args.block_dim)
    csv_text = comparison_csv(rows)
    print(csv_text, end="")
    above = sum(1 for r in rows if r.ratio > 1)
    print(
        f"# {len(rows)} cells; ratio > 1 in {above}/{len(rows)} "
        f"({args.algorithm_a} costlier than {args.algorithm_b})"
    )
    if args.out_csv:
        Path(args.out_csv).write_text(csv_text, encoding="utf-8")
        print(f"# csv written to {args.out_csv}")
    if args.out_chart:
        write_ratio_chart(rows, args.out_chart, args.algorithm_a, args.algorithm_b)
        print(f"# chart written to {args.out_chart}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# validate-miss-bound
# ---------------------------------------------------------------------------


def cmd_validate_miss_bound(args: argparse.Namespace) -> int:
    if args.trials < 1:
        raise InvalidArgumentError("--trials must be >= 1")
    if args.trace_len < 1:
        raise InvalidArgumentError("--trace-len must be >= 1")
    core_list = [int(tok) for tok in args.cores.split(",") if tok]
    if not core_list or any(c < 1 for c in core_list):
        raise InvalidArgumentError("--cores must be a comma list of positive ints")
    geom = cachesim.CacheGeometry(
        capacity_lines=args.capacity_lines, line_elements=args.line_elements
    )
    stats = {c: {"trials": 0, "violations": 0, "max_ratio": 0.0} for c in core_list}
    for trial in range(args.trials):
        cores = core_list[trial % len(core_list)]
        trace = traces.random_trace(
            core_count=cores,
            length=args.trace_len,
            address_space=args.address_space,
            seed=args.seed + trial,
            cap=max(args.trace_len, traces.DEFAULT_TRACE_CAP),
        )
        report = cachesim.check_miss_bound(trace, geom)
        s = stats[cores]
        s["trials"] += 1
        s["max_ratio"] = max(s["max_ratio"], report.ratio)
        if not report.holds:
            s["violations"] += 1
    total_violations = 0
    max_ratio = 0.0
    for cores in core_list:
        s = stats[cores]
        total_violations += s["violations"]
        max_ratio = max(max_ratio, s["max_ratio"])
        print(
            f"cores={cores}: trials={s['trials']}, violations={s['violations']}, "
            f"max distributed/(cores*serial) = {s['max_ratio']:.4g}"
        )
    print(
        f"overall: {args.trials} trials, {total_violations} violations, "
        f"max ratio {max_ratio:.4g}"
    )
    if total_violations:
        print("FAIL: distributed misses exceeded cores x serial misses")
        return EXIT_VALIDATION
    print("PASS: distributed misses within cores x serial misses on every trace")
    return EXIT_OK


# ---------------------------------------------------------------------------
# validate-io
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IoValidationRow:
    kernel: str
    size: str
    closed_form_io: int
    simulated_misses: int

    @property
    def ratio(self) -> float:
        return self.simulated_misses / self.closed_form_io

    @property
    def in_window(self) -> bool:
        lo, hi = IO_RATIO_WINDOW
        return lo <= self.ratio <= hi


def _sparse_validation_case(
    kernel: str, n: int, density: float, seed: int, geom: cachesim.CacheGeometry, cap: int
) -> IoValidationRow:
    nnz = max(1, round(density * n * n))
    coords = traces.SparseCoords.random(n, n, nnz, seed=seed)
    nr = max(sum(1 for r, _ in coords.entries if r == row) for row in range(n))
    nc = max(sum(1 for _, c in coords.entries if c == col) for col in range(n))
    inp = complexity.SparseInput(
        name=f"random-{n}x{n}", rows=n, cols=n, nonzeros=coords.nnz,
        max_nnz_per_col=nc, max_nnz_per_row=nr,
    )
    if kernel == "csr":
        closed = complexity.csr_complexity(inp).io
        trace = traces.trace_csr(coords, cap=cap)
    elif kernel == "csc":
        closed = complexity.csc_complexity(inp).io
        trace = traces.trace_csc(coords, cap=cap)
    elif kernel == "csb":
        closed = complexity.csb_complexity(inp, geom.line_elements).io
        trace = traces.trace_csb(coords, inp.effective_block_dim(), cap=cap)
    else:
        raise InvalidArgumentError(f"unknown sparse kernel {kernel!r}")
    sim = cachesim.simulate_serial(trace, geom).misses_total
    return IoValidationRow(kernel, f"{n}x{n}", closed, sim)


def _dense_validation_case(
    kernel: str, dense: complexity.DenseInput, geom: cachesim.CacheGeometry | None, cap: int
) -> IoValidationRow:
    if geom is None:
        geom = dense_validation_geometry(dense)
    z = geom.capacity_elements
    if kernel == "basic-matmul":
        closed = complexity.basic_matmul_complexity(dense, geom.line_elements, 1).io
        trace = traces.trace_basic_matmul(dense.n, dense.m, dense.p, cap=cap)
    elif kernel == "co-matmul":
        closed = complexity.co_matmul_complexity(dense, geom.line_elements, z, 1).io
        trace = traces.trace_co_matmul(dense.n, dense.m, dense.p, cap=cap)
    else:
        raise InvalidArgumentError(f"unknown dense kernel {kernel!r}")
    sim = cachesim.simulate_serial(trace, geom).misses_total
    return IoValidationRow(kernel, dense.name, closed, sim)


def run_io_validation(
    kernel: str,
    sizes: list[str],
    seed: int = 0,
    density: float = DEFAULT_VALIDATION_DENSITY,
    geom: cachesim.CacheGeometry | None = None,
    cap: int = traces.DEFAULT_TRACE_CAP,
) -> list[IoValidationRow]:
    model = complexity.get_model(kernel)
    rows = []
    for idx, token in enumerate(sizes):
        if model.kind == "sparse":
            rows.append(
                _sparse_validation_case(
                    kernel, int(token), density, seed + idx,
                    geom or SPMV_VALIDATION_GEOMETRY, cap,
                )
            )
        else:
            rows.append(_dense_validation_case(kernel, _parse_dense(token), geom, cap))
    return rows


def cmd_validate_io(args: argparse.Namespace) -> int:
    sizes = [tok for tok in args.sizes.split(",") if tok]
    if not sizes:
        raise InvalidArgumentError("--sizes must be a comma list of sizes")
    geom = None
    if args.capacity_lines is not None or args.line_elements is not None:
        geom = cachesim.CacheGeometry(
            capacity_lines=args.capacity_lines if args.capacity_lines is not None else 4,
            line_elements=args.line_elements if args.line_elements is not None else 8,
        )
    rows = run_io_validation(
        args.kernel, sizes, seed=args.seed, density=args.density, geom=geom,
        cap=args.trace_cap,
    )
    lo, hi = IO_RATIO_WINDOW
    print(f"{'kernel':<14} {'size':<12} {'closed_io':>10} {'simulated':>10} {'ratio':>8}  flag")
    flagged = 0
    for row in rows:
        flag = "" if row.in_window else "OUT-OF-WINDOW"
        if not row.in_window:
            flagged += 1
        print(
            f"{row.kernel:<14} {row.size:<12} {row.closed_form_io:>10} "
            f"{row.simulated_misses:>10} {row.ratio:>8.3f}  {flag}"
        )
    print(f"{flagged} of {len(rows)} cases outside [{lo}, {hi}]")
    if flagged:
        print("FAIL: simulated misses diverge from the closed forms")
        return EXIT_VALIDATION
    print("PASS: simulated misses within a factor of 4 of the closed forms")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="encost",
        description="Analytical energy-cost comparison of multithreaded algorithms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("platforms", help="list the platform catalog")
    p.add_argument("--platforms-file", help="extra platform catalog file to merge")
    p.add_argument("--export", help="write the merged catalog to this path")
    p.set_defaults(func=cmd_platforms)

    p = sub.add_parser("estimate", help="energy estimate for one algorithm/input/platform")
    p.add_argument("--algorithm", required=True, help="csr|csc|csb|basic-matmul|co-matmul")
    p.add_argument("--input", required=True, help="matrix name or dense size like 1024x1024x1024")
    p.add_argument("--platform", required=True, help="platform profile name")
    p.add_argument("--bound-mode", default="auto", choices=list(energy.BOUND_MODES))
    p.add_argument("--block-dim", type=int, help="override the sparse block size")
    p.add_argument("--platforms-file")
    p.add_argument("--matrices-file")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("compare", help="energy-ratio sweep of two algorithms")
    p.add_argument("--a", dest="algorithm_a", required=True, help="numerator algorithm")
    p.add_argument("--b", dest="algorithm_b", required=True, help="denominator algorithm")
    p.add_argument("--inputs", help="comma list of matrix names or dense sizes "
                                    "(default: all built-in matrices for sparse models)")
    p.add_argument("--platforms", default="Xeon,Xeon-Phi", help="comma list of platform names")
    p.add_argument("--bound-mode", default="auto", choices=list(energy.BOUND_MODES))
    p.add_argument("--block-dim", type=int, help="override the sparse block size")
    p.add_argument("--out-csv", help="write the comparison table to this CSV file")
    p.add_argument("--out-chart", help="write a ratio bar chart (svg recommended)")
    p.add_argument("--platforms-file")
    p.add_argument("--matrices-file")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser(
        "validate-miss-bound",
        help="check distributed misses <= cores x serial misses on random traces",
    )
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--cores", default="2,4,8", help="comma list of core counts to cycle over")
    p.add_argument("--trace-len", type=int, default=10000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--address-space", type=int, default=256)
    p.add_argument("--capacity-lines", type=int, default=8)
    p.add_argument("--line-elements", type=int, default=8)
    p.set_defaults(func=cmd_validate_miss_bound)

    p = sub.add_parser(
        "validate-io", help="compare closed-form I/O counts with simulated misses"
    )
    p.add_argument("--kernel", required=True, help="csr|csc|csb|basic-matmul|co-matmul")
    p.add_argument("--sizes", required=True,
                   help="comma list: n for sparse (random n x n), or dense sizes like 64x64x64")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--density", type=float, default=DEFAULT_VALIDATION_DENSITY)
    p.add_argument("--capacity-lines", type=int, help="override cache capacity in lines")
    p.add_argument("--line-elements", type=int, help="override line size in elements")
    p.add_argument("--trace-cap", type=int, default=traces.DEFAULT_TRACE_CAP)
    p.set_defaults(func=cmd_validate_io)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EncostError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
