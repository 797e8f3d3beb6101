"""Residue-class acceleration tables for the halved-odd map.

For a window of n steps, the trajectory of any m depends on m only through
m mod 2^n: if c is the number of odd steps in the window for that residue
class, there is a single integer offset d with

    iterate_n(m) = (3^c * m + d) / 2^n        for every m in the class,
    0 <= d < 3^c * 2^n.

A table holds (c, d) for all 2^n residues, so one lookup plus one affine
evaluation advances any integer n steps exactly. Residue 0 is built from the
representative 2^n (giving c=0, d=0, pure halving). Offsets are kept in a
fixed 128-bit slot per entry with an overflow flag; entries that exceed even
that (impossible at the default cap, the bound is 3^n * 2^n) spill to an
arbitrary-precision side dict.

The on-disk cache format is little-endian:
    magic "CLTZ" | version u32 | n u32 | 2^n records of (c u32, d_lo u64,
    d_hi u64, overflow u8).
A cache is purely an optimization; loading one reproduces exactly the arrays
a fresh build produces.
"""

from __future__ import annotations

import os
import struct
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Optional

import numpy as np

from .maps import _require_natural

MAGIC = b"CLTZ"
CACHE_VERSION = 1
DEFAULT_CAP = 24
CACHE_DIR_ENV = "COLLATZ_LAB_CACHE_DIR"

_RECORD_DTYPE = np.dtype(
    [("c", "<u4"), ("d_lo", "<u8"), ("d_hi", "<u8"), ("overflow", "u1")]
)

# int64-vectorized building is exact iff every intermediate fits: the binding
# constraint is d < 3^n * 2^n < 2^63, true exactly for n <= 24.
_VECTOR_BUILD_MAX_N = 24


class AffineStep(NamedTuple):
    """One table entry: advance n steps via (3^c * m + d) >> n."""

    c: int
    d: int


@dataclass
class StepTable:
    """All 2^n affine window steps, plus lazily built packed parity vectors."""

    n: int
    c: np.ndarray
    d_lo: np.ndarray
    d_hi: np.ndarray
    overflow: np.ndarray
    big: dict[int, int] = field(default_factory=dict)
    _parity: Optional[np.ndarray] = None
    _pow3: Optional[list[int]] = None

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def pow3(self) -> list[int]:
        if self._pow3 is None:
            self._pow3 = [3**i for i in range(self.n + 1)]
        return self._pow3

    def entry(self, residue: int) -> AffineStep:
        if not 0 <= residue < self.size:
            raise ValueError(f"residue {residue} out of range for n={self.n}")
        if self.overflow[residue]:
            d = self.big[residue]
        else:
            d = int(self.d_lo[residue]) | (int(self.d_hi[residue]) << 64)
        return AffineStep(int(self.c[residue]), d)

    @property
    def parity(self) -> np.ndarray:
        """Packed parity vectors per residue (bit k = parity at step k)."""
        if self._parity is None:
            self._parity = _build_parity(self.n)
        return self._parity

    @property
    def max_safe_value(self) -> int:
        """Largest v for which the int64 vectorized advance cannot overflow."""
        d_max = int(self.d_lo.max()) if self.size else 0
        return ((1 << 63) - 1 - d_max) // (3**self.n)


def build_table(n: int, cap: int = DEFAULT_CAP) -> StepTable:
    """Build the full 2^n-entry table by running n exact steps per residue.

    n above the cap is refused (the default cap keeps offsets inside 64 bits
    and the table inside memory); raise cap explicitly to go further, which
    falls back to scalar big-int construction.
    """
    _require_window_n(n)
    if n > cap:
        raise ValueError(f"n={n} exceeds table cap {cap}; pass cap= to override")
    if n <= _VECTOR_BUILD_MAX_N:
        return _build_vectorized(n)
    return _build_scalar(n)


def _build_vectorized(n: int, chunk: int = 1 << 20) -> StepTable:
    size = 1 << n
    c_out = np.zeros(size, dtype=np.uint32)
    d_out = np.zeros(size, dtype=np.uint64)
    parity = np.zeros(size, dtype=np.uint32)
    pow3 = np.array([3**i for i in range(n + 1)], dtype=np.int64)
    for lo in range(0, size, chunk):
        hi = min(lo + chunk, size)
        q = np.arange(lo, hi, dtype=np.int64)
        if lo == 0:
            q[0] = size  # representative for residue 0
        v = q.copy()
        cc = np.zeros(hi - lo, dtype=np.int64)
        par = np.zeros(hi - lo, dtype=np.uint32)
        for k in range(n):
            odd = (v & 1).astype(bool)
            cc += odd
            par |= odd.astype(np.uint32) << np.uint32(k)
            v = np.where(odd, (3 * v + 1) >> 1, v >> 1)
        d = (v << n) - pow3[cc] * q
        c_out[lo:hi] = cc.astype(np.uint32)
        d_out[lo:hi] = d.astype(np.uint64)
        parity[lo:hi] = par
    table = StepTable(
        n=n,
        c=c_out,
        d_lo=d_out,
        d_hi=np.zeros(size, dtype=np.uint64),
        overflow=np.zeros(size, dtype=np.uint8),
    )
    table._parity = parity
    return table


def _build_scalar(n: int) -> StepTable:
    size = 1 << n
    c_out = np.zeros(size, dtype=np.uint32)
    d_lo = np.zeros(size, dtype=np.uint64)
    d_hi = np.zeros(size, dtype=np.uint64)
    overflow = np.zeros(size, dtype=np.uint8)
    parity = np.zeros(size, dtype=np.uint32)
    big: dict[int, int] = {}
    mask64 = (1 << 64) - 1
    for r in range(size):
        q = r if r else size
        v = q
        c = 0
        par = 0
        for k in range(n):
            if v & 1:
                c += 1
                par |= 1 << k
                v = (3 * v + 1) >> 1
            else:
                v >>= 1
        d = (v << n) - 3**c * q
        c_out[r] = c
        parity[r] = par
        if d >> 128:
            overflow[r] = 1
            big[r] = d
        else:
            d_lo[r] = d & mask64
            d_hi[r] = d >> 64
    table = StepTable(n=n, c=c_out, d_lo=d_lo, d_hi=d_hi, overflow=overflow, big=big)
    table._parity = parity
    return table


def _build_parity(n: int, chunk: int = 1 << 20) -> np.ndarray:
    """Packed parity vectors for all residues mod 2^n (rebuilt after cache loads)."""
    size = 1 << n
    parity = np.zeros(size, dtype=np.uint32)
    for lo in range(0, size, chunk):
        hi = min(lo + chunk, size)
        v = np.arange(lo, hi, dtype=np.int64)
        if lo == 0:
            v[0] = size
        par = np.zeros(hi - lo, dtype=np.uint32)
        for k in range(n):
            odd = (v & 1).astype(bool)
            par |= odd.astype(np.uint32) << np.uint32(k)
            v = np.where(odd, (3 * v + 1) >> 1, v >> 1)
        parity[lo:hi] = par
    return parity


def batch_advance(m: int, table: StepTable) -> int:
    """Advance m by n steps in one affine evaluation, exact for any m >= 1."""
    _require_natural(m)
    step = table.entry(m & (table.size - 1))
    num = table.pow3[step.c] * m + step.d
    return num >> table.n


def advance_array(values: np.ndarray, table: StepTable) -> np.ndarray:
    """Vectorized n-step advance for int64 values; caller bounds the inputs.

    Exact provided values.max() <= table.max_safe_value.
    """
    residues = values & np.int64(table.size - 1)
    c = table.c[residues]
    d = table.d_lo[residues].astype(np.int64)
    pow3 = np.array(table.pow3, dtype=np.int64)[c]
    return (pow3 * values + d) >> np.int64(table.n)


@dataclass(frozen=True)
class CensusResult:
    """Occupancy of the 2^n parity patterns over one window of 2^n integers."""

    n: int
    start: int
    total: int
    distinct: int
    min_count: int
    max_count: int

    @property
    def uniform(self) -> bool:
        return self.distinct == self.total and self.min_count == 1 and self.max_count == 1


def parity_census(n: int, table: Optional[StepTable] = None) -> CensusResult:
    """Check the residues mod 2^n produce every length-n parity vector once."""
    _require_window_n(n)
    if table is not None and table.n != n:
        raise ValueError(f"table has n={table.n}, census asked for n={n}")
    parity = table.parity if table is not None else _build_parity(n)
    return _census_from_packed(parity, n, start=1)


def census_on_interval(start: int, n: int) -> CensusResult:
    """Same census over the shifted window [start, start + 2^n)."""
    _require_natural(start)
    _require_window_n(n)
    size = 1 << n
    # Worst-case value bound during the walk: (3/2)^n * (start + 2^n + 1).
    vmax_bound = ((start + size + 1) * 3**n) >> n
    if 3 * vmax_bound + 1 < (1 << 63):
        v = np.arange(start, start + size, dtype=np.int64)
        packed = np.zeros(size, dtype=np.uint32)
        for k in range(n):
            odd = (v & 1).astype(bool)
            packed |= odd.astype(np.uint32) << np.uint32(k)
            v = np.where(odd, (3 * v + 1) >> 1, v >> 1)
    else:
        packed = np.zeros(size, dtype=np.uint32)
        for i in range(size):
            v = start + i
            par = 0
            for k in range(n):
                if v & 1:
                    par |= 1 << k
                    v = (3 * v + 1) >> 1
                else:
                    v >>= 1
            packed[i] = par
    return _census_from_packed(packed, n, start=start)


def _census_from_packed(packed: np.ndarray, n: int, start: int) -> CensusResult:
    counts = np.bincount(packed.astype(np.int64), minlength=1 << n)
    return CensusResult(
        n=n,
        start=start,
        total=1 << n,
        distinct=int(np.count_nonzero(counts)),
        min_count=int(counts.min()),
        max_count=int(counts.max()),
    )


def save_table(table: StepTable, path) -> None:
    """Write the cache file. Oversize (>128-bit) offsets are unrepresentable."""
    if table.big:
        raise ValueError("table has offsets beyond 128 bits; cache format cannot hold it")
    records = np.empty(table.size, dtype=_RECORD_DTYPE)
    records["c"] = table.c
    records["d_lo"] = table.d_lo
    records["d_hi"] = table.d_hi
    records["overflow"] = table.overflow
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4sII", MAGIC, CACHE_VERSION, table.n))
        fh.write(records.tobytes())


def load_table(path) -> StepTable:
    """Read a cache file back into a StepTable (parity vectors rebuild lazily)."""
    with open(path, "rb") as fh:
        header = fh.read(12)
        if len(header) != 12:
            raise ValueError(f"{path}: truncated header")
        magic, version, n = struct.unpack("<4sII", header)
        if magic != MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        if version != CACHE_VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        if n < 1 or n > 40:
            raise ValueError(f"{path}: implausible n={n}")
        payload = fh.read()
    expected = (1 << n) * _RECORD_DTYPE.itemsize
    if len(payload) != expected:
        raise ValueError(f"{path}: expected {expected} record bytes, got {len(payload)}")
    records = np.frombuffer(payload, dtype=_RECORD_DTYPE)
    if records["overflow"].any():
        raise ValueError(f"{path}: overflow entries present; file is not self-contained")
    return StepTable(
        n=n,
        c=records["c"].copy(),
        d_lo=records["d_lo"].copy(),
        d_hi=records["d_hi"].copy(),
        overflow=records["overflow"].copy(),
    )


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_DIR_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "collatz-lab"


def cache_path(n: int) -> Path:
    return default_cache_dir() / f"table_n{n:02d}.bin"


def get_table(n: int, use_cache: bool = True, write_cache: Optional[bool] = None) -> StepTable:
    """Load the n-table from cache if present, else build (and maybe save).

    write_cache defaults to writing only when the cache dir env var is set,
    so plain library use never touches the filesystem uninvited.
    """
    path = cache_path(n)
    if use_cache and path.is_file():
        return load_table(path)
    table = build_table(n)
    if write_cache is None:
        write_cache = os.environ.get(CACHE_DIR_ENV) is not None
    if write_cache:
        save_table(table, path)
    return table


@dataclass(frozen=True)
class BenchReport:
    """Throughput comparison between stepping modes on mixed orbits."""

    n: int
    total_steps: int
    scalar_steps_per_sec: float
    vector_steps_per_sec: float
    batch_steps_per_sec: float

    @property
    def speedup_vs_scalar(self) -> float:
        return self.batch_steps_per_sec / self.scalar_steps_per_sec

    @property
    def speedup_vs_vector(self) -> float:
        return self.batch_steps_per_sec / self.vector_steps_per_sec


def bench_throughput(table: StepTable, total_steps: int, width: int = 1 << 18) -> BenchReport:
    """Time three engines on the same kind of mixed-orbit workload.

    scalar: one exact Python-int step per operation (what orbit()/tau() do for
    a single value). vector: one step per element per numpy pass. batch: n
    steps per element per table lookup pass. Lanes restart on fresh odd starts
    whenever they reach 1 (or, for the table path, leave the int64-safe zone),
    keeping every engine busy on live orbits throughout.
    """
    if total_steps < 1:
        raise ValueError(f"total_steps must be >= 1, got {total_steps}")

    # scalar engine
    done = 0
    seed = 3
    t0 = time.perf_counter()
    v = seed
    while done < total_steps:
        if v == 1:
            seed += 2
            v = seed
        v = (3 * v + 1) >> 1 if v & 1 else v >> 1
        done += 1
    scalar_elapsed = time.perf_counter() - t0

    # vectorized single-step engine
    lanes = np.arange(3, 3 + 2 * width, 2, dtype=np.int64)
    counter = lanes[-1]
    done = 0
    t0 = time.perf_counter()
    v = lanes.copy()
    while done < total_steps:
        odd = (v & 1).astype(bool)
        v = np.where(odd, (3 * v + 1) >> 1, v >> 1)
        done += width
        stale = v == 1
        n_stale = int(stale.sum())
        if n_stale:
            v[stale] = np.arange(counter + 2, counter + 2 + 2 * n_stale, 2, dtype=np.int64)
            counter += 2 * n_stale
    vector_elapsed = time.perf_counter() - t0

    # table batch engine
    safe = np.int64(table.max_safe_value)
    counter = lanes[-1]
    done = 0
    t0 = time.perf_counter()
    v = lanes.copy()
    while done < total_steps:
        v = advance_array(v, table)
        done += width * table.n
        stale = (v == 1) | (v > safe)
        n_stale = int(stale.sum())
        if n_stale:
            v[stale] = np.arange(counter + 2, counter + 2 + 2 * n_stale, 2, dtype=np.int64)
            counter += 2 * n_stale
    batch_elapsed = time.perf_counter() - t0

    return BenchReport(
        n=table.n,
        total_steps=total_steps,
        scalar_steps_per_sec=total_steps / scalar_elapsed,
        vector_steps_per_sec=total_steps / vector_elapsed,
        batch_steps_per_sec=total_steps / batch_elapsed,
    )


def _require_window_n(n) -> None:
    if not isinstance(n, int) or isinstance(n, bool):
        raise ValueError(f"window n must be an int, got {type(n).__name__}")
    if n < 1:
        raise ValueError(f"window n must be >= 1, got {n}")
