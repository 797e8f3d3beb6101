"""Stopping-time statistics for the halved-odd map.

tau(m) counts steps to the first 1. The engine here resolves tau for whole
ranges: values below 2^16 finish through a precomputed sieve; larger values
advance 16 steps at a time through a residue table while doing so provably
cannot cross 1 (any v >= 2^16 satisfies iterate_j(v) >= v / 2^j > 1 for
j < 16), falling back to single steps in the rare stretches where the
windowed affine arithmetic would not fit in int64. Everything stays exact.

All sums and densities label their step convention: tau counts halved-odd
steps (the odd branch (3m+1)/2 is one step, not two).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath
import numpy as np

from .density import CumulativeRow, DensityReport, ShellRow, _gap_sign, _shell_bounds
from .maps import _require_natural
from .step_tables import StepTable, advance_array, get_table
from ._chunks import run_chunked

DEFAULT_BUDGET = 10**6
SIEVE_BITS = 16
_CHUNK = 1 << 16

_sieve: Optional[np.ndarray] = None


def tau_sieve() -> np.ndarray:
    """Exact tau for every v < 2^16, tau_sieve()[v]; index 0 is unused (-1)."""
    global _sieve
    if _sieve is None:
        limit = 1 << SIEVE_BITS
        arr = np.full(limit, -1, dtype=np.int64)
        arr[1] = 0
        for start in range(2, limit):
            v = start
            steps = 0
            # walk until a value below start, whose tau is already known
            while v >= start:
                v = (3 * v + 1) >> 1 if v & 1 else v >> 1
                steps += 1
            arr[start] = steps + arr[v]
        _sieve = arr
    return _sieve


def compute_tau_range(
    lo: int,
    hi: int,
    budget: int = DEFAULT_BUDGET,
    table: Optional[StepTable] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """(tau, unresolved) arrays for m in [lo, hi); tau is 0 where unresolved.

    Pass a 16-step table to accelerate; omit it for pure single-stepping.
    """
    _require_natural(lo)
    if hi <= lo:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=bool)
    sieve = tau_sieve()
    small_lim = sieve.size
    safe = np.int64(table.max_safe_value) if table is not None else None
    size = hi - lo
    v = np.arange(lo, hi, dtype=np.int64)
    steps = np.zeros(size, dtype=np.int64)
    tau = np.full(size, -1, dtype=np.int64)
    active = np.ones(size, dtype=bool)

    while True:
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        vv = v[idx]
        small = vv < small_lim
        if small.any():
            pos = idx[small]
            tau[pos] = steps[pos] + sieve[vv[small]]
            active[pos] = False
            idx = idx[~small]
            if idx.size == 0:
                break
            vv = vv[~small]
        over = steps[idx] > budget
        if over.any():
            active[idx[over]] = False
            idx = idx[~over]
            if idx.size == 0:
                break
            vv = vv[~over]
        if table is not None:
            windowed = vv <= safe
        else:
            windowed = np.zeros(idx.size, dtype=bool)
        if windowed.any():
            wpos = idx[windowed]
            v[wpos] = advance_array(vv[windowed], table)
            steps[wpos] += table.n
        single = ~windowed
        if single.any():
            spos = idx[single]
            vs = vv[single]
            odd = (vs & 1).astype(bool)
            v[spos] = np.where(odd, (3 * vs + 1) >> 1, vs >> 1)
            steps[spos] += 1

    unresolved = (tau < 0) | (tau > budget)
    return np.where(unresolved, 0, tau), unresolved


@dataclass(frozen=True)
class TauCheckpoint:
    """Running totals over [1, x]: resolved tau sum and its normalization."""

    x: int
    sum_tau: int
    unresolved: int

    @property
    def normalized(self) -> float:
        if self.x < 2:
            return 0.0
        return self.sum_tau / (self.x * math.log2(self.x))


@dataclass
class TauSummary:
    """tau aggregated over [1, x], T-step convention, unresolved excluded from sums."""

    x: int
    budget: int
    sum_tau: int
    unresolved: int
    floor_violations: int
    used_table: bool
    checkpoints: list[TauCheckpoint]

    @property
    def normalized(self) -> float:
        if self.x < 2:
            return 0.0
        return self.sum_tau / (self.x * math.log2(self.x))

    def to_csv(self) -> str:
        lines = ["x,sum_tau,normalized,unresolved"]
        for row in self.checkpoints:
            lines.append(
                f"{row.x},{row.sum_tau},{row.normalized:.12f},{row.unresolved}"
            )
        return "\n".join(lines) + "\n"


def default_checkpoints(x: int) -> list[int]:
    """Powers of 2 and of 10 up to x, plus x itself, ascending."""
    marks = set()
    p = 1
    while p <= x:
        marks.add(p)
        p *= 2
    p = 1
    while p <= x:
        marks.add(p)
        p *= 10
    marks.add(x)
    return sorted(marks)


def tau_average(
    x: int,
    budget: int = DEFAULT_BUDGET,
    use_table: bool = True,
    threads: Optional[int] = None,
    checkpoints: Optional[list[int]] = None,
) -> TauSummary:
    """Sum tau(m) for m <= x with running checkpoints.

    normalized divides by x * log2(x) at each checkpoint (0 below x=2).
    Unresolved m contribute nothing to sums and are tallied separately.
    floor_violations counts resolved m with tau(m) < floor(log2 m); the map
    needs at least that many halvings, so any nonzero count is a bug flag.
    """
    _require_natural(x)
    if x < 2:
        raise ValueError(f"tau_average requires x >= 2, got x={x}")
    if budget < 0:
        raise ValueError(f"budget must be >= 0, got {budget}")
    marks = sorted(set(checkpoints)) if checkpoints else default_checkpoints(x)
    if any(c < 1 or c > x for c in marks):
        raise ValueError("checkpoints must lie in [1, x]")
    table = get_table(SIEVE_BITS) if use_table else None

    def worker(lo: int, hi: int):
        tau, unres = compute_tau_range(lo, hi, budget, table)
        contrib = np.where(unres, 0, tau)
        m = np.arange(lo, hi, dtype=np.int64)
        floors = np.frexp(m.astype(np.float64))[1] - 1  # floor(log2 m), exact
        viol = int((~unres & (tau < floors)).sum())
        cum = np.cumsum(contrib)
        cum_unres = np.cumsum(unres)
        local = {}
        for c in marks:
            if lo <= c < hi:
                local[c] = (int(cum[c - lo]), int(cum_unres[c - lo]))
        return (
            int(contrib.sum()),
            int(unres.sum()),
            viol,
            local,
        )

    results = run_chunked(1, x + 1, _CHUNK, worker, threads)
    running_sum = 0
    running_unres = 0
    floor_violations = 0
    at_mark: dict[int, tuple[int, int]] = {}
    for chunk_sum, chunk_unres, viol, local in results:
        for c, (part_sum, part_unres) in local.items():
            at_mark[c] = (running_sum + part_sum, running_unres + part_unres)
        running_sum += chunk_sum
        running_unres += chunk_unres
        floor_violations += viol
    rows = [
        TauCheckpoint(x=c, sum_tau=at_mark[c][0], unresolved=at_mark[c][1])
        for c in marks
    ]
    return TauSummary(
        x=x,
        budget=budget,
        sum_tau=running_sum,
        unresolved=running_unres,
        floor_violations=floor_violations,
        used_table=table is not None,
        checkpoints=rows,
    )


def _exceeds(tau_val: int, m: int, alpha: float) -> bool:
    """tau(m) > alpha * log2(m), guarded float first, mpmath on the boundary."""
    gap = tau_val - alpha * math.log2(m)
    return _gap_sign(
        gap, lambda: tau_val - mpmath.mpf(alpha) * mpmath.log(m) / mpmath.log(2)
    ) > 0


def tau_exceedance_density(
    alpha: float,
    n_max: int,
    budget: int = DEFAULT_BUDGET,
    use_table: bool = True,
    threads: Optional[int] = None,
) -> DensityReport:
    """Density report of {m : tau(m) > alpha * log2(m)} over [1, n_max].

    m = 1 (log2 = 0) is a member iff tau > 0, i.e. never. Unresolved m are
    excluded from members and tallied in the report.
    """
    _require_natural(n_max)
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    table = get_table(SIEVE_BITS) if use_table else None

    def worker(lo: int, hi: int):
        tau, unres = compute_tau_range(lo, hi, budget, table)
        m = np.arange(lo, hi, dtype=np.int64)
        log2m = np.log2(m.astype(np.float64))
        gap = tau - alpha * log2m
        certain = ~unres & (gap > 1e-9)
        borderline = ~unres & (np.abs(gap) <= 1e-9)
        border = [(int(mm), int(tt)) for mm, tt in zip(m[borderline], tau[borderline])]
        return int(certain.sum()), border, int(unres.sum())

    return _indicator_report(
        label=f"tau_exceed(alpha={alpha:g})",
        n_max=n_max,
        worker=worker,
        resolve=lambda mt: _exceeds(mt[1], mt[0], alpha),
        threads=threads,
    )


def _indicator_report(label, n_max, worker, resolve, threads) -> DensityReport:
    shells = []
    cumulative = []
    cum_members = 0
    cum_total = 0
    unresolved_total = 0
    for shell, lo, hi in _shell_bounds(2.0, n_max):
        members = 0
        for certain, border, unres in run_chunked(lo, hi, _CHUNK, worker, threads):
            members += certain
            unresolved_total += unres
            for item in border:
                if resolve(item):
                    members += 1
        total = hi - lo
        shells.append(ShellRow(n=shell, lo=lo, hi=hi, members=members, total=total))
        cum_members += members
        cum_total += total
        cumulative.append(CumulativeRow(upto=hi - 1, members=cum_members, total=cum_total))
    return DensityReport(
        label=label,
        base=2.0,
        n_max=n_max,
        shells=shells,
        cumulative=cumulative,
        exact=True,
        unresolved=unresolved_total,
    )


def _floor_power_exact(m: int, theta: Fraction, fast: float) -> int:
    """floor(m^theta) fixed up with exact integer power comparisons."""
    t = max(int(fast), 1)
    p, q = theta.numerator, theta.denominator
    mp_ = m**p
    while (t + 1) ** q <= mp_:
        t += 1
    while t**q > mp_:
        t -= 1
    return t


def tmin_threshold_density(
    theta: float,
    n_max: int,
    budget: int = DEFAULT_BUDGET,
    use_table: bool = True,
    threads: Optional[int] = None,
) -> DensityReport:
    """Density report of {m : some iterate within budget is <= m^theta}.

    theta uses decimal-literal semantics; thresholds floor(m^theta) are exact.
    The table path skips a 16-step window only while v > threshold * 2^16,
    which cannot jump over a sub-threshold value (iterate_j(v) >= v / 2^j).
    """
    _require_natural(n_max)
    theta_frac = Fraction(str(theta))
    if theta_frac <= 0:
        raise ValueError(f"theta must be > 0, got {theta}")
    table = get_table(SIEVE_BITS) if use_table else None

    def worker(lo: int, hi: int):
        m = np.arange(lo, hi, dtype=np.int64)
        fast = np.power(m.astype(np.float64), float(theta_frac))
        thr = np.floor(fast).astype(np.int64)
        # exact fixup where the float power sits near an integer
        frac = fast - np.floor(fast)
        shaky = (frac < 1e-9) | (frac > 1 - 1e-9) | (fast > 2**52)
        for i in np.flatnonzero(shaky):
            thr[i] = _floor_power_exact(int(m[i]), theta_frac, float(fast[i]))
        thr = np.maximum(thr, 1)

        size = hi - lo
        v = m.copy()
        steps = np.zeros(size, dtype=np.int64)
        is_member = np.zeros(size, dtype=bool)
        unres = np.zeros(size, dtype=bool)
        active = np.ones(size, dtype=bool)
        safe = np.int64(table.max_safe_value) if table is not None else None
        while True:
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            vv = v[idx]
            hit = vv <= thr[idx]
            if hit.any():
                pos = idx[hit]
                is_member[pos] = True
                active[pos] = False
                idx = idx[~hit]
                if idx.size == 0:
                    break
                vv = vv[~hit]
            over = steps[idx] >= budget
            if over.any():
                unres[idx[over]] = True
                active[idx[over]] = False
                idx = idx[~over]
                if idx.size == 0:
                    break
                vv = vv[~over]
            if table is not None:
                windowed = (vv <= safe) & (vv > (thr[idx] << SIEVE_BITS))
            else:
                windowed = np.zeros(idx.size, dtype=bool)
            if windowed.any():
                wpos = idx[windowed]
                budget_room = budget - steps[wpos]
                ok = budget_room >= table.n
                if not ok.all():
                    # not enough budget for a full window: single-step instead
                    windowed[np.flatnonzero(windowed)[~ok]] = False
                    wpos = idx[windowed]
                if wpos.size:
                    v[wpos] = advance_array(v[wpos], table)
                    steps[wpos] += table.n
            single = ~windowed
            if single.any():
                spos = idx[single]
            else:
                spos = None
            if spos is not None and spos.size:
                vs = v[spos]
                odd = (vs & 1).astype(bool)
                v[spos] = np.where(odd, (3 * vs + 1) >> 1, vs >> 1)
                steps[spos] += 1
        return int(is_member.sum()), [], int(unres.sum())

    return _indicator_report(
        label=f"tmin_below(theta={theta_frac})",
        n_max=n_max,
        worker=worker,
        resolve=lambda item: False,
        threads=threads,
    )


@dataclass(frozen=True)
class TauHistogram:
    """Histogram of tau(m) / log2(m) over 2 <= m <= n_max."""

    n_max: int
    bucket_width: float
    counts: dict[int, int]  # bucket index -> count; bucket i covers [i*w, (i+1)*w)
    total: int
    unresolved: int

    def bucket_edges(self, index: int) -> tuple[float, float]:
        return index * self.bucket_width, (index + 1) * self.bucket_width


def tau_ratio_histogram(
    n_max: int,
    bucket_width: float = 0.5,
    budget: int = DEFAULT_BUDGET,
    use_table: bool = True,
    threads: Optional[int] = None,
) -> TauHistogram:
    """Bucket tau(m)/log2(m) for 2 <= m <= n_max (m=1 has no ratio).

    Bucket edges are resolved with a 1e-9 nudge so exact ratios (powers of
    two give ratio 1.0) land in the bucket whose left edge they equal.
    """
    _require_natural(n_max)
    if n_max < 2:
        raise ValueError("histogram needs n_max >= 2")
    if not (bucket_width > 0):
        raise ValueError(f"bucket_width must be > 0, got {bucket_width}")
    table = get_table(SIEVE_BITS) if use_table else None

    def worker(lo: int, hi: int):
        tau, unres = compute_tau_range(lo, hi, budget, table)
        m = np.arange(lo, hi, dtype=np.int64)
        ratios = tau / np.log2(m.astype(np.float64))
        buckets = np.floor(ratios / bucket_width + 1e-9).astype(np.int64)
        ok = ~unres
        vals, counts = np.unique(buckets[ok], return_counts=True)
        return dict(zip(vals.tolist(), counts.tolist())), int(unres.sum())

    merged: dict[int, int] = {}
    unresolved = 0
    for local, unres in run_chunked(2, n_max + 1, _CHUNK, worker, threads):
        unresolved += unres
        for k, c in local.items():
            merged[k] = merged.get(k, 0) + c
    total = sum(merged.values())
    return TauHistogram(
        n_max=n_max,
        bucket_width=bucket_width,
        counts=dict(sorted(merged.items())),
        total=total,
        unresolved=unresolved,
    )
