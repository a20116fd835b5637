"""Empirical ground truth: exhaustive and randomized bit-level sweeps.

Sweeps compare the single-precision kernel against a double-precision
reference 1/sqrt (reference error ~2^-52, a million times below anything
measured here).  Absolute error is always reported on the normalized scale
ytilde - 1/sqrt(xtilde), since the raw-scale difference would shrink with
the exponent and match nothing.

Work over the 2^24-point grid is split into chunks; chunk results reduce by
max/sum, so the sweep parallelizes over disjoint bit ranges.  FISR_THREADS
caps the worker count.
"""
from __future__ import annotations

import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple

import numpy as np

from .floatbits import MAX_NORMAL_BITS, MIN_NORMAL_BITS
from .kernel import KernelConfig
from .model import (
    PARITY_STEP,
    UNIT_HI_BITS,
    UNIT_LO_BITS,
    SeedParam,
)

_CHUNK = 1 << 21
_GRID_SIZE = UNIT_HI_BITS - UNIT_LO_BITS  # 2^24 patterns in [1, 4)

DOMAIN_UNIT_EXHAUSTIVE = "unit-exhaustive"
DOMAIN_FULL_RANDOM = "full-random"

CSV_HEADER = "x,x_tilde,error_relative,error_absolute,R,iterations"


def thread_count() -> int:
    """Worker cap: FISR_THREADS when set, else the CPU count."""
    raw = os.environ.get("FISR_THREADS", "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep: kernel config, input domain, and error kind."""

    magic: int
    iterations: int
    domain: str = DOMAIN_UNIT_EXHAUSTIVE
    error_kind: str = "both"  # "relative", "absolute" or "both"
    samples: int = 4000       # full-random only
    rng_seed: int = 0

    def __post_init__(self) -> None:
        KernelConfig.relaxed(self.magic, self.iterations)  # range checks
        if self.domain not in (DOMAIN_UNIT_EXHAUSTIVE, DOMAIN_FULL_RANDOM):
            raise ValueError(f"unknown domain {self.domain!r}")
        if self.error_kind not in ("relative", "absolute", "both"):
            raise ValueError(f"unknown error_kind {self.error_kind!r}")
        if self.domain == DOMAIN_FULL_RANDOM and self.samples < 0:
            raise ValueError("samples must be >= 0")


@dataclass
class ErrorReport:
    """Max/argmax of relative and normalized absolute error over a sweep."""

    magic: int
    iterations: int
    domain: str
    checked: int
    max_relative_error: float
    argmax_relative_bits: int
    max_absolute_error: float
    argmax_absolute_bits: int
    error_kind: str = "both"
    rng_seed: Optional[int] = None
    predicted: Optional[float] = None
    sample_cloud: Optional[List[Tuple[float, float, float, float]]] = None


@dataclass
class SeedModelReport:
    """Exhaustive bit-equality of the closed-form seed model vs the kernel."""

    magic: int
    checked: int
    mismatches: int
    mismatch_bits: List[int] = field(default_factory=list)  # first 10 offenders
    smooth_gap: float = 0.0  # max |single-t model - actual seed| on the grid


@dataclass
class ScalingReport:
    """Bit-exactness of invsqrt(2^(2n) x) == 2^(-n) invsqrt(x)."""

    trials: int
    checked: int
    skipped: int          # pairs whose scaled input leaves the normal range
    violations: int
    violation_bits: List[int] = field(default_factory=list)
    rng_seed: int = 0


# ---------------------------------------------------------------------------
# shared grid and vectorized kernel


class _UnitGrid:
    """Read-only arrays covering every single-precision value in [1, 4)."""

    __slots__ = ("bits", "x64", "parity")

    def __init__(self) -> None:
        self.bits = np.arange(UNIT_LO_BITS, UNIT_HI_BITS, dtype=np.uint32)
        self.x64 = self.bits.view(np.float32).astype(np.float64)
        self.parity = (self.bits & np.uint32(1)).astype(np.uint8)


_grid_lock = threading.Lock()
_grid: Optional[_UnitGrid] = None


def _unit_grid() -> _UnitGrid:
    global _grid
    if _grid is None:
        with _grid_lock:
            if _grid is None:
                _grid = _UnitGrid()
    return _grid


def _kernel_on_bits(bits: np.ndarray, magic: int, iterations: int) -> np.ndarray:
    """Vector mirror of the scalar kernel; float32 ops, no FMA."""
    x = bits.view(np.float32)
    half = np.float32(0.5) * x
    y = (np.uint32(magic) - (bits >> np.uint32(1))).view(np.float32)
    for _ in range(iterations):
        y = y * (np.float32(1.5) - half * y * y)
    return y


def _piecewise_seed_model(xs: np.ndarray, t) -> np.ndarray:
    """Vectorized seed model; t may be a scalar or a per-element array."""
    d = t - xs
    inner = 0.5 + np.where(d >= 0.0, 0.125, 0.0625) * d
    return np.where(xs < 2.0, 0.75 + 0.125 * t - 0.25 * xs, inner)


def _chunks(total: int) -> List[Tuple[int, int]]:
    return [(a, min(a + _CHUNK, total)) for a in range(0, total, _CHUNK)]


def _map_chunks(fn, total: int) -> list:
    parts = _chunks(total)
    workers = min(thread_count(), len(parts))
    if workers <= 1:
        return [fn(a, b) for a, b in parts]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda span: fn(*span), parts))


# ---------------------------------------------------------------------------
# seed-model verification


def verify_seed_model(magic: int, stride: int = 1) -> SeedModelReport:
    """Compare the kernel seed against the exact model over the [1, 4) grid.

    stride > 1 checks a stratified subset (every stride-th pattern) instead
    of all 2^24; mismatches are data, not errors.  Also measures the gap of
    the single-t (smooth) model against the actual seed values.
    """
    param = SeedParam.from_magic(magic)
    grid = _unit_grid()

    if stride > 1:
        bits = np.ascontiguousarray(grid.bits[::stride])
        return _seed_model_on_bits(param, bits)

    def chunk(a: int, b: int) -> SeedModelReport:
        return _seed_model_on_bits(param, grid.bits[a:b],
                                   grid.x64[a:b], grid.parity[a:b])

    parts = _map_chunks(chunk, _GRID_SIZE)
    out = SeedModelReport(magic, 0, 0)
    for p in parts:
        out.checked += p.checked
        out.mismatches += p.mismatches
        out.mismatch_bits = (out.mismatch_bits + p.mismatch_bits)[:10]
        out.smooth_gap = max(out.smooth_gap, p.smooth_gap)
    return out


def _seed_model_on_bits(param: SeedParam, bits: np.ndarray,
                        xs: Optional[np.ndarray] = None,
                        parity: Optional[np.ndarray] = None) -> SeedModelReport:
    if xs is None:
        xs = bits.view(np.float32).astype(np.float64)
    if parity is None:
        parity = (bits & np.uint32(1)).astype(np.uint8)
    t = param.t_even + parity * PARITY_STEP
    seed_u32 = np.uint32(param.magic) - (bits >> np.uint32(1))

    exact = _piecewise_seed_model(xs, t)
    neq = exact.astype(np.float32).view(np.uint32) != seed_u32
    mismatches = int(np.count_nonzero(neq))
    offenders = [int(v) for v in bits[neq][:10]] if mismatches else []

    smooth = _piecewise_seed_model(xs, param.t_smooth)
    seed_f64 = seed_u32.view(np.float32).astype(np.float64)
    gap = float(np.max(np.abs(smooth - seed_f64)))
    return SeedModelReport(param.magic, len(bits), mismatches, offenders, gap)


# ---------------------------------------------------------------------------
# error sweeps


def _normalized_errors(bits: np.ndarray, magic: int,
                       iterations: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(relative, normalized absolute, x_tilde) for positive-normal patterns."""
    y64 = _kernel_on_bits(bits, magic, iterations).astype(np.float64)
    x64 = bits.view(np.float32).astype(np.float64)
    rel = y64 / (1.0 / np.sqrt(x64)) - 1.0
    e = (bits >> np.uint32(23)).astype(np.int64) - 127
    n = ((e - (e & 1)) >> 1).astype(np.int32)
    x_tilde = np.ldexp(x64, -2 * n)
    y_tilde = np.ldexp(y64, n)
    abs_n = y_tilde - 1.0 / np.sqrt(x_tilde)
    return rel, abs_n, x_tilde


def sweep(spec: SweepSpec, collect_cloud: bool = False) -> ErrorReport:
    """Run the sweep and report max/argmax of both error kinds."""
    if spec.domain == DOMAIN_FULL_RANDOM:
        rng = np.random.default_rng(spec.rng_seed)
        bits = rng.integers(MIN_NORMAL_BITS, MAX_NORMAL_BITS + 1,
                            size=spec.samples, dtype=np.uint32)
        rel, abs_n, x_tilde = _normalized_errors(bits, spec.magic, spec.iterations)
        report = _report_from_arrays(spec, bits, rel, abs_n)
        report.rng_seed = spec.rng_seed
        if collect_cloud:
            x = bits.view(np.float32).astype(np.float64)
            report.sample_cloud = list(zip(x.tolist(), x_tilde.tolist(),
                                           rel.tolist(), abs_n.tolist()))
        return report

    grid = _unit_grid()

    def chunk(a: int, b: int):
        bits = grid.bits[a:b]
        y64 = _kernel_on_bits(bits, spec.magic, spec.iterations).astype(np.float64)
        ref = 1.0 / np.sqrt(grid.x64[a:b])
        rel = y64 / ref - 1.0
        abs_n = y64 - ref  # x_tilde == x on the unit grid
        i_rel = int(np.argmax(np.abs(rel)))
        i_abs = int(np.argmax(np.abs(abs_n)))
        return (abs(float(rel[i_rel])), int(bits[i_rel]),
                abs(float(abs_n[i_abs])), int(bits[i_abs]), len(bits))

    parts = _map_chunks(chunk, _GRID_SIZE)
    best_rel = max(parts, key=lambda p: p[0])
    best_abs = max(parts, key=lambda p: p[2])
    return ErrorReport(spec.magic, spec.iterations, spec.domain,
                       sum(p[4] for p in parts),
                       best_rel[0], best_rel[1], best_abs[2], best_abs[3],
                       error_kind=spec.error_kind)


def _report_from_arrays(spec: SweepSpec, bits: np.ndarray,
                        rel: np.ndarray, abs_n: np.ndarray) -> ErrorReport:
    if len(bits) == 0:
        return ErrorReport(spec.magic, spec.iterations, spec.domain, 0,
                           0.0, 0, 0.0, 0, error_kind=spec.error_kind)
    i_rel = int(np.argmax(np.abs(rel)))
    i_abs = int(np.argmax(np.abs(abs_n)))
    return ErrorReport(spec.magic, spec.iterations, spec.domain, len(bits),
                       abs(float(rel[i_rel])), int(bits[i_rel]),
                       abs(float(abs_n[i_abs])), int(bits[i_abs]),
                       error_kind=spec.error_kind)


# ---------------------------------------------------------------------------
# scaling equivariance


def verify_scaling(magic: int, iterations: int, trials: int = 100_000,
                   rng_seed: int = 0) -> ScalingReport:
    """Random (x, n) trials of the exact power-of-four scaling law.

    Safe range means both x and 2^(2n) x stay clear of the lowest binade:
    at exponent field 1 the halving inside a Newton step denormalizes and
    rounds away a mantissa bit, so the two sides can differ by one ulp
    there.  Unsafe pairs are skipped (counted, not failed); for the rest
    the comparison is bit-exact.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(rng_seed)
    bits = rng.integers(MIN_NORMAL_BITS, MAX_NORMAL_BITS + 1,
                        size=trials, dtype=np.uint32)
    n = rng.integers(-63, 64, size=trials, dtype=np.int64)
    exp_field = (bits >> np.uint32(23)).astype(np.int64)
    safe = (exp_field >= 2) & (exp_field + 2 * n >= 2) & (exp_field + 2 * n <= 254)
    bits_ok = bits[safe]
    n_ok = n[safe]

    scaled_bits = (bits_ok.astype(np.int64) + (2 * n_ok << 23)).astype(np.uint32)
    y_direct = _kernel_on_bits(scaled_bits, magic, iterations)
    y_scaled = np.ldexp(_kernel_on_bits(bits_ok, magic, iterations),
                        (-n_ok).astype(np.int32))
    bad = y_direct.view(np.uint32) != y_scaled.view(np.uint32)
    violations = int(np.count_nonzero(bad))
    examples = [int(v) for v in bits_ok[bad][:10]] if violations else []
    return ScalingReport(trials, int(len(bits_ok)), int(trials - len(bits_ok)),
                         violations, examples, rng_seed)


# ---------------------------------------------------------------------------
# cloud emission


@dataclass
class CloudSample:
    """Plot-friendly subsample of an emitted cloud (at most ~100k points)."""

    magic: int
    iterations: int
    domain: str
    x: np.ndarray
    x_tilde: np.ndarray
    error_relative: np.ndarray
    error_absolute: np.ndarray


def _cloud_batches(spec: SweepSpec) -> Iterator[Tuple[np.ndarray, ...]]:
    """Yield (x, x_tilde, rel, abs) arrays in input order."""
    if spec.domain == DOMAIN_FULL_RANDOM:
        rng = np.random.default_rng(spec.rng_seed)
        bits = rng.integers(MIN_NORMAL_BITS, MAX_NORMAL_BITS + 1,
                            size=spec.samples, dtype=np.uint32)
        rel, abs_n, x_tilde = _normalized_errors(bits, spec.magic, spec.iterations)
        yield bits.view(np.float32).astype(np.float64), x_tilde, rel, abs_n
        return
    grid = _unit_grid()
    for a, b in _chunks(_GRID_SIZE):
        bits = grid.bits[a:b]
        y64 = _kernel_on_bits(bits, spec.magic, spec.iterations).astype(np.float64)
        xs = grid.x64[a:b]
        ref = 1.0 / np.sqrt(xs)
        rel = y64 / ref - 1.0
        yield xs, xs, rel, y64 - ref


def emit_cloud(spec: SweepSpec, path) -> CloudSample:
    """Write the error cloud as CSV; returns a subsample for plotting.

    Columns: x,x_tilde,error_relative,error_absolute,R,iterations with 9
    significant digits for the single-precision columns and 17 for the
    double-precision error columns.  Deterministic for a given rng_seed.
    Beware: an exhaustive-domain cloud has 2^24 rows (about a gigabyte).
    """
    tail = f",0x{spec.magic:08X},{spec.iterations}\n"
    kept: List[np.ndarray] = []
    total = _GRID_SIZE if spec.domain == DOMAIN_UNIT_EXHAUSTIVE else spec.samples
    keep_stride = max(1, total // 100_000)
    with open(path, "w", encoding="ascii") as fh:
        fh.write(CSV_HEADER + "\n")
        for xs, x_tilde, rel, abs_n in _cloud_batches(spec):
            fh.writelines(
                f"{x:.9g},{xt:.9g},{dr:.17g},{da:.17g}{tail}"
                for x, xt, dr, da in zip(xs.tolist(), x_tilde.tolist(),
                                         rel.tolist(), abs_n.tolist()))
            kept.append(np.stack([xs[::keep_stride], x_tilde[::keep_stride],
                                  rel[::keep_stride], abs_n[::keep_stride]]))
    if kept:
        sample = np.concatenate(kept, axis=1)
    else:
        sample = np.zeros((4, 0))
    return CloudSample(spec.magic, spec.iterations, spec.domain,
                       sample[0], sample[1], sample[2], sample[3])
