"""Platform characterization: energy parameters per operation and per cache-line transfer.

A platform is abstracted by four parameters, all in nanojoules:

* ``eps_op``  -- dynamic energy of one operation (nJ/flop)
* ``eps_io``  -- dynamic energy of one cache-line transfer (nJ/line)
* ``pi_op``   -- static energy accrued over the time of one operation (nJ/flop)
* ``pi_io``   -- static energy accrued over the time of one line transfer (nJ/line)

They can be derived from raw hardware constants (powers, cycle counts,
frequency), converted from energy-roofline style measurements, or fitted from
(work, io, duration, energy) samples by ordinary least squares. A built-in
catalog ships parameters for eleven characterized platforms spanning x86,
GPU, Xeon Phi and ARM parts.

Cache quantities are stored in *elements* of the working datatype, default
8 elements per line (64-byte line of doubles) and 32768 elements of private
cache (256 KiB); byte-based inputs are converted at ingestion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    CatalogFormatError,
    DegenerateFitError,
    InsufficientDataError,
    InvalidArgumentError,
)

NJ_PER_J = 1e9

# Stated defaults for platforms without documented cache geometry.
DEFAULT_CACHELINE_ELEMENTS = 8
DEFAULT_PRIVATE_CACHE_ELEMENTS = 32768

# Relative tolerance for consistency between derived parameters and raw constants.
RAW_CONSISTENCY_RTOL = 1e-9


def _require_positive(**fields: float) -> None:
    for name, value in fields.items():
        if not value > 0:
            raise InvalidArgumentError(f"{name} must be strictly positive, got {value!r}")


@dataclass(frozen=True)
class RawPlatformConstants:
    """Raw hardware constants from which the four energy parameters derive.

    Powers are in watts, frequency in hertz, cycle counts are per operation /
    per cache-line transfer, cache sizes in elements of the working datatype.
    """

    static_power: float           # whole-platform static power (W)
    dynamic_power_per_op: float   # dynamic power of one active core computing (W)
    dynamic_power_per_io: float   # dynamic power of one core transferring a line (W)
    cycles_per_op: float          # cycles per operation
    cycles_per_cacheline: float   # cycles per cache-line transfer
    frequency: float              # core frequency (Hz)
    cacheline_elements: int = DEFAULT_CACHELINE_ELEMENTS
    private_cache_elements: int = DEFAULT_PRIVATE_CACHE_ELEMENTS
    core_count: int = 1

    def __post_init__(self) -> None:
        _require_positive(
            static_power=self.static_power,
            dynamic_power_per_op=self.dynamic_power_per_op,
            dynamic_power_per_io=self.dynamic_power_per_io,
            cycles_per_op=self.cycles_per_op,
            cycles_per_cacheline=self.cycles_per_cacheline,
            frequency=self.frequency,
            cacheline_elements=self.cacheline_elements,
            private_cache_elements=self.private_cache_elements,
            core_count=self.core_count,
        )
        if self.cacheline_elements > self.private_cache_elements:
            raise InvalidArgumentError(
                "cacheline_elements must not exceed private_cache_elements "
                f"({self.cacheline_elements} > {self.private_cache_elements})"
            )


def derive_energy_parameters(raw: RawPlatformConstants) -> tuple[float, float, float, float]:
    """Derive (eps_op, eps_io, pi_op, pi_io) in nanojoules from raw constants.

    Each parameter is a power multiplied by the duration of the corresponding
    event: operations take cycles_per_op/frequency seconds, line transfers
    take cycles_per_cacheline/frequency seconds.
    """
    op_time = raw.cycles_per_op / raw.frequency
    io_time = raw.cycles_per_cacheline / raw.frequency
    eps_op = raw.dynamic_power_per_op * op_time * NJ_PER_J
    eps_io = raw.dynamic_power_per_io * io_time * NJ_PER_J
    pi_op = raw.static_power * op_time * NJ_PER_J
    pi_io = raw.static_power * io_time * NJ_PER_J
    return eps_op, eps_io, pi_op, pi_io


@dataclass(frozen=True)
class PlatformProfile:
    """One platform's energy parameters plus cache geometry.

    ``core_count`` is optional: operations that need it fail loudly rather
    than guessing. When ``raw`` is present, the four parameters must be
    consistent with it to within RAW_CONSISTENCY_RTOL.
    """

    name: str
    processor: str
    eps_op: float   # nJ per operation (dynamic)
    eps_io: float   # nJ per cache-line transfer (dynamic)
    pi_op: float    # nJ static per operation-time
    pi_io: float    # nJ static per line-transfer-time
    cacheline_elements: int = DEFAULT_CACHELINE_ELEMENTS
    private_cache_elements: int = DEFAULT_PRIVATE_CACHE_ELEMENTS
    core_count: int | None = None
    raw: RawPlatformConstants | None = None

    def __post_init__(self) -> None:
        if not self.name:
            raise InvalidArgumentError("name must be non-empty")
        _require_positive(
            eps_op=self.eps_op,
            eps_io=self.eps_io,
            pi_op=self.pi_op,
            pi_io=self.pi_io,
            cacheline_elements=self.cacheline_elements,
            private_cache_elements=self.private_cache_elements,
        )
        if self.core_count is not None and self.core_count < 1:
            raise InvalidArgumentError(f"core_count must be >= 1, got {self.core_count}")
        if self.raw is not None:
            self._check_raw_consistency()

    def _check_raw_consistency(self) -> None:
        derived = derive_energy_parameters(self.raw)
        stored = (self.eps_op, self.eps_io, self.pi_op, self.pi_io)
        names = ("eps_op", "eps_io", "pi_op", "pi_io")
        for name, got, want in zip(names, stored, derived):
            if not math.isclose(got, want, rel_tol=RAW_CONSISTENCY_RTOL):
                raise InvalidArgumentError(
                    f"{name}={got!r} inconsistent with raw constants (expected {want!r})"
                )
        ratio = self.pi_io / self.pi_op
        cycle_ratio = self.raw.cycles_per_cacheline / self.raw.cycles_per_op
        if not math.isclose(ratio, cycle_ratio, rel_tol=RAW_CONSISTENCY_RTOL):
            raise InvalidArgumentError(
                f"pi_io/pi_op={ratio!r} inconsistent with cycle ratio {cycle_ratio!r}"
            )

    def require_core_count(self) -> int:
        from .errors import MissingCoreCountError

        if self.core_count is None:
            raise MissingCoreCountError(
                f"platform {self.name!r} has no core_count; supply a profile that does"
            )
        return self.core_count


def profile_from_raw(name: str, processor: str, raw: RawPlatformConstants) -> PlatformProfile:
    """Build a full profile whose parameters derive from raw constants."""
    eps_op, eps_io, pi_op, pi_io = derive_energy_parameters(raw)
    return PlatformProfile(
        name=name,
        processor=processor,
        eps_op=eps_op,
        eps_io=eps_io,
        pi_op=pi_op,
        pi_io=pi_io,
        cacheline_elements=raw.cacheline_elements,
        private_cache_elements=raw.private_cache_elements,
        core_count=raw.core_count,
        raw=raw,
    )


def from_roofline(
    energy_per_flop: float,
    energy_per_byte: float,
    constant_power: float,
    time_per_flop: float,
    time_per_byte: float,
    cacheline_bytes: int,
    *,
    name: str = "roofline",
    processor: str = "",
    element_bytes: int = 8,
) -> PlatformProfile:
    """Convert energy-roofline measurements into a platform profile.

    Inputs: dynamic energy per flop and per byte (nJ), constant (static)
    power (W), time per flop and per byte (s), and the cache-line size in
    bytes. Per-byte quantities are scaled up to whole cache lines; times are
    multiplied by the constant power to yield static energies.
    """
    _require_positive(
        energy_per_flop=energy_per_flop,
        energy_per_byte=energy_per_byte,
        constant_power=constant_power,
        time_per_flop=time_per_flop,
        time_per_byte=time_per_byte,
        cacheline_bytes=cacheline_bytes,
        element_bytes=element_bytes,
    )
    return PlatformProfile(
        name=name,
        processor=processor,
        eps_op=energy_per_flop,
        eps_io=energy_per_byte * cacheline_bytes,
        pi_op=constant_power * time_per_flop * NJ_PER_J,
        pi_io=constant_power * time_per_byte * cacheline_bytes * NJ_PER_J,
        cacheline_elements=max(1, cacheline_bytes // element_bytes),
    )


@dataclass(frozen=True)
class MeasurementSample:
    """One calibration measurement: counted work and I/O, elapsed time, energy.

    Units are the caller's (typically flops, cache lines, seconds, joules);
    fitted parameters come back in the same units.
    """

    work: float
    io: float
    duration: float
    energy: float

    def __post_init__(self) -> None:
        for field in ("work", "io", "duration", "energy"):
            if getattr(self, field) < 0:
                raise InvalidArgumentError(f"{field} must be non-negative")
        if not self.duration > 0:
            raise InvalidArgumentError("duration must be strictly positive")


@dataclass(frozen=True)
class ParameterFit:
    """Least-squares estimates of the energy parameters, plus the residual."""

    eps_op: float        # energy per unit work
    eps_io: float        # energy per unit io
    static_power: float  # energy per unit duration
    residual: float      # residual sum of squares


def fit_parameters(samples: list[MeasurementSample]) -> ParameterFit:
    """Fit energy ~ eps_op*work + eps_io*io + static_power*duration by OLS.

    Requires at least 3 samples and a full-rank (work, io, duration) design
    matrix. No regularization: three parameters, and the design is expected
    to be well conditioned.
    """
    if len(samples) < 3:
        raise InsufficientDataError(f"need at least 3 samples, got {len(samples)}")
    design = np.array([[s.work, s.io, s.duration] for s in samples], dtype=float)
    energy = np.array([s.energy for s in samples], dtype=float)
    if np.linalg.matrix_rank(design) < 3:
        raise DegenerateFitError("design matrix (work, io, duration) is rank deficient")
    coef, residual, _rank, _sv = np.linalg.lstsq(design, energy, rcond=None)
    if residual.size == 0:
        # lstsq omits residuals for exactly- or under-determined systems
        rss = float(np.sum((design @ coef - energy) ** 2))
    else:
        rss = float(residual[0])
    return ParameterFit(eps_op=float(coef[0]), eps_io=float(coef[1]),
                        static_power=float(coef[2]), residual=rss)


# ---------------------------------------------------------------------------
# Built-in catalog
# ---------------------------------------------------------------------------

# (name, processor, eps_op, pi_op, eps_io, pi_io, core_count)
# Energies in nJ. The first nine rows come from published energy-roofline
# characterizations; the Xeon and Xeon-Phi rows were fitted from
# micro-benchmark measurements on local hardware.
_CATALOG_ROWS: tuple[tuple[str, str, float, float, float, float, int | None], ...] = (
    ("Nehalem i7-950", "Intel i7-950", 0.670, 2.455, 50.88, 408.80, None),
    ("Ivy Bridge i3-3217U", "Intel i3-3217U", 0.024, 0.591, 26.75, 58.99, None),
    ("Bobcat CPU", "AMD E2-1800", 0.199, 3.980, 27.84, 387.47, None),
    ("Fermi GTX 580", "NVIDIA GF100", 0.213, 0.622, 32.83, 45.66, None),
    ("Kepler GTX 680", "NVIDIA GK104", 0.263, 0.452, 27.97, 26.90, None),
    ("Kepler GTX Titan", "NVIDIA GK110", 0.094, 0.077, 17.09, 32.94, None),
    ("XeonPhi KNC", "Intel 5110P", 0.012, 0.178, 8.70, 63.65, None),
    ("Cortex-A9", "TI OMAP 4460", 0.302, 1.152, 51.84, 174.00, None),
    ("Arndale Cortex-A15", "Samsung Exynos 5", 0.275, 1.385, 24.70, 89.34, None),
    ("Xeon", "2xIntel E5-2650l v3", 0.263, 0.108, 8.86, 23.29, 24),
    ("Xeon-Phi", "Intel 31S1P", 0.006, 0.078, 25.02, 64.40, 57),
)


def builtin_catalog() -> list[PlatformProfile]:
    """Return the 11 built-in platform profiles."""
    return [
        PlatformProfile(
            name=name,
            processor=processor,
            eps_op=eps_op,
            eps_io=eps_io,
            pi_op=pi_op,
            pi_io=pi_io,
            core_count=cores,
        )
        for name, processor, eps_op, pi_op, eps_io, pi_io, cores in _CATALOG_ROWS
    ]


# ---------------------------------------------------------------------------
# Catalog file format
# ---------------------------------------------------------------------------
#
# One INI-style section per platform; energy keys carry the nJ unit in their
# name and cache sizes are in elements:
#
#   [Xeon]
#   processor = 2xIntel E5-2650l v3
#   eps_op_nJ = 0.263
#   eps_io_nJ = 8.86
#   pi_op_nJ = 0.108
#   pi_io_nJ = 23.29
#   cacheline_elements = 8
#   private_cache_elements = 32768
#   core_count = 24

_REQUIRED_KEYS = ("eps_op_nJ", "eps_io_nJ", "pi_op_nJ", "pi_io_nJ")
_OPTIONAL_KEYS = ("processor", "cacheline_elements", "private_cache_elements", "core_count")


def dump_catalog(profiles: list[PlatformProfile]) -> str:
    """Serialize profiles to the catalog text format (stable across runs)."""
    blocks = ["# encost platform catalog (energies in nJ, cache sizes in elements)"]
    for p in profiles:
        lines = [f"[{p.name}]"]
        if p.processor:
            lines.append(f"processor = {p.processor}")
        lines.append(f"eps_op_nJ = {p.eps_op!r}")
        lines.append(f"eps_io_nJ = {p.eps_io!r}")
        lines.append(f"pi_op_nJ = {p.pi_op!r}")
        lines.append(f"pi_io_nJ = {p.pi_io!r}")
        lines.append(f"cacheline_elements = {p.cacheline_elements}")
        lines.append(f"private_cache_elements = {p.private_cache_elements}")
        if p.core_count is not None:
            lines.append(f"core_count = {p.core_count}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def _parse_sections(text: str, source: str) -> list[tuple[str, dict[str, str]]]:
    sections: list[tuple[str, dict[str, str]]] = []
    current: dict[str, str] | None = None
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if not name:
                raise CatalogFormatError(f"{source}:{lineno}: empty section name")
            current = {}
            sections.append((name, current))
            continue
        if "=" not in line:
            raise CatalogFormatError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        if current is None:
            raise CatalogFormatError(f"{source}:{lineno}: key outside of a [section]")
        key, _, value = line.partition("=")
        current[key.strip()] = value.strip()
    return sections


def parse_catalog(text: str, source: str = "<catalog>") -> list[PlatformProfile]:
    """Parse the catalog text format into profiles.

    Raises CatalogFormatError naming the offending section/field.
    """
    profiles = []
    for name, fields in _parse_sections(text, source):
        for key in fields:
            if key not in _REQUIRED_KEYS and key not in _OPTIONAL_KEYS:
                raise CatalogFormatError(f"{source}: [{name}]: unknown field {key!r}")
        for key in _REQUIRED_KEYS:
            if key not in fields:
                raise CatalogFormatError(f"{source}: [{name}]: missing field {key!r}")

        def _float(key: str) -> float:
            try:
                return float(fields[key])
            except ValueError:
                raise CatalogFormatError(
                    f"{source}: [{name}]: field {key!r} is not a number: {fields[key]!r}"
                ) from None

        def _int(key: str, default: int) -> int:
            if key not in fields:
                return default
            try:
                return int(fields[key])
            except ValueError:
                raise CatalogFormatError(
                    f"{source}: [{name}]: field {key!r} is not an integer: {fields[key]!r}"
                ) from None

        core_count: int | None
        if "core_count" in fields:
            core_count = _int("core_count", 0)
        else:
            core_count = None
        try:
            profiles.append(
                PlatformProfile(
                    name=name,
                    processor=fields.get("processor", ""),
                    eps_op=_float("eps_op_nJ"),
                    eps_io=_float("eps_io_nJ"),
                    pi_op=_float("pi_op_nJ"),
                    pi_io=_float("pi_io_nJ"),
                    cacheline_elements=_int("cacheline_elements", DEFAULT_CACHELINE_ELEMENTS),
                    private_cache_elements=_int(
                        "private_cache_elements", DEFAULT_PRIVATE_CACHE_ELEMENTS
                    ),
                    core_count=core_count,
                )
            )
        except InvalidArgumentError as exc:
            raise CatalogFormatError(f"{source}: [{name}]: {exc}") from exc
    return profiles


def load_catalog(path: str | Path) -> list[PlatformProfile]:
    p = Path(path)
    return parse_catalog(p.read_text(encoding="utf-8"), source=str(p))
