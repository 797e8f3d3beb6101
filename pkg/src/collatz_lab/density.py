"""Empirical density measurement for growth-band membership predicates.

A PredicateSpec names one of seven families of sets of naturals; member()
decides membership exactly for a single m; measure_density() counts members
shell by shell ([a^n, a^(n+1)) for a shell base a) up to a limit and reports
per-shell and cumulative fractions; fit_star_density() fits the complement
to C / N^D; hoeffding_check() compares the exact violation fraction of a
parity concentration event against its 4 e^(-2 eps^2 N) bound.

Band comparisons run in float64 log2 space with a guard band of 1e-9; any
comparison that lands inside the guard escalates through mpmath at 60, 120
and 240 digits. A gap still unresolved after that is treated as exact
equality: inclusive bounds accept it, strict bounds reject it. Genuine
equalities only arise in degenerate spots (k = 0 terms, m a power of two),
which the escalation resolves deterministically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import mpmath
import numpy as np

from . import constants as C
from .maps import _require_natural, col_step, syracuse_step, t_step
from ._chunks import chunk_spans, run_chunked

MAIN_T = "MAIN_T"
REFORM_LAMBDA = "REFORM_LAMBDA"
PARITY_BAND = "PARITY_BAND"
RKM_BOUND = "RKM_BOUND"
PARITY_WINDOW = "PARITY_WINDOW"
COL_VARIANT = "COL_VARIANT"
SYRACUSE_VARIANT = "SYRACUSE_VARIANT"

FAMILIES = (
    MAIN_T,
    REFORM_LAMBDA,
    PARITY_BAND,
    RKM_BOUND,
    PARITY_WINDOW,
    COL_VARIANT,
    SYRACUSE_VARIANT,
)

_GUARD = 1e-9
_MP_DPS_LADDER = (60, 120, 240)
_SAFE_INT64 = 1 << 61

# Exhaustive scans are the default up to this limit; beyond it only the
# explicitly requested sampling mode (labeled non-exact) is offered.
EXHAUSTIVE_LIMIT = 1 << 26


@dataclass(frozen=True)
class PredicateSpec:
    """One membership predicate: a family plus its numeric parameters.

    epsilon is the band half-width (all families). lambda_ is the target
    exponent, REFORM_LAMBDA only. alpha is the window start coefficient,
    PARITY_WINDOW only.
    """

    family: str
    epsilon: float
    lambda_: Optional[float] = None
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(
                f"unknown family {self.family!r}; expected one of {', '.join(FAMILIES)}"
            )
        if not (self.epsilon > 0):
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.family == REFORM_LAMBDA:
            if self.lambda_ is None or not (0.0 <= self.lambda_ <= 1.0):
                raise ValueError(
                    f"REFORM_LAMBDA requires lambda in [0, 1], got {self.lambda_}"
                )
        elif self.lambda_ is not None:
            raise ValueError(f"lambda only applies to REFORM_LAMBDA, not {self.family}")
        if self.family == PARITY_WINDOW:
            if self.alpha is None or not (0.0 < self.alpha <= 1.0):
                raise ValueError(
                    f"PARITY_WINDOW requires alpha in (0, 1], got {self.alpha}"
                )
        elif self.alpha is not None:
            raise ValueError(f"alpha only applies to PARITY_WINDOW, not {self.family}")

    def label(self) -> str:
        parts = [f"{self.family}(epsilon={self.epsilon:g}"]
        if self.lambda_ is not None:
            parts.append(f", lambda={self.lambda_:g}")
        if self.alpha is not None:
            parts.append(f", alpha={self.alpha:g}")
        return "".join(parts) + ")"


def _mp_log2(x) -> mpmath.mpf:
    return mpmath.log(x) / mpmath.log(2)


def _mp_range_coeff() -> mpmath.mpf:
    return 1 / (1 - _mp_log2(3) / 2)


def _mp_syr_coeff() -> mpmath.mpf:
    return 1 / (2 - _mp_log2(3))


def _mp_col_coeff() -> mpmath.mpf:
    return 3 / (2 - _mp_log2(3))


def _gap_sign(fast: float, mp_gap: Callable[[], mpmath.mpf]) -> int:
    """Sign of a log-domain gap: fast float64 first, mpmath ladder if close."""
    if fast >= _GUARD:
        return 1
    if fast <= -_GUARD:
        return -1
    for dps in _MP_DPS_LADDER:
        with mpmath.workdps(dps):
            g = mp_gap()
            tol = mpmath.mpf(10) ** (15 - dps)
            if g > tol:
                return 1
            if g < -tol:
                return -1
    return 0


def _floor_guarded(fast: float, mp_value: Callable[[], mpmath.mpf]) -> int:
    """floor() with mpmath confirmation when fast sits within 1e-9 of an integer."""
    f = math.floor(fast)
    if min(fast - f, f + 1 - fast) >= _GUARD:
        return f
    with mpmath.workdps(60):
        return int(mpmath.floor(mp_value()))


def _k_max(m: int, which: str) -> int:
    """Inclusive k-range endpoint floor(coeff * log2(m)) for the named band."""
    if which == "range":
        coeff, mp_coeff = C.RANGE_COEFF, _mp_range_coeff
    elif which == "syr":
        coeff, mp_coeff = C.SYRACUSE_COEFF, _mp_syr_coeff
    elif which == "col":
        coeff, mp_coeff = C.COL_COEFF, _mp_col_coeff
    else:
        raise ValueError(which)
    return _floor_guarded(
        coeff * math.log2(m), lambda: mp_coeff() * _mp_log2(m)
    )


def _band_walk(m: int, eps: float, step, log2_step: float, mp_log2_step, k_max: int) -> bool:
    """Check (base^k) * m^(1-eps) <= iterate_k(m) <= (base^k) * m^(1+eps) for k <= k_max."""
    log2m = math.log2(m)
    lower0 = (1.0 - eps) * log2m
    upper0 = (1.0 + eps) * log2m
    v = m
    for k in range(k_max + 1):
        lv = math.log2(v)
        lo_gap = lv - (k * log2_step + lower0)
        if _gap_sign(lo_gap, _mp_band_gap(v, k, m, 1.0 - eps, mp_log2_step)) < 0:
            return False
        hi_gap = (k * log2_step + upper0) - lv
        if _gap_sign(hi_gap, _mp_band_gap_upper(v, k, m, 1.0 + eps, mp_log2_step)) < 0:
            return False
        if k < k_max:
            v = step(v)
    return True


def _mp_band_gap(v, k, m, exponent, mp_log2_step):
    return lambda: _mp_log2(v) - (k * mp_log2_step() + mpmath.mpf(exponent) * _mp_log2(m))


def _mp_band_gap_upper(v, k, m, exponent, mp_log2_step):
    return lambda: (k * mp_log2_step() + mpmath.mpf(exponent) * _mp_log2(m)) - _mp_log2(v)


def _mp_step_t():
    return _mp_log2(3) / 2 - 1


def _mp_step_col():
    return (_mp_log2(3) - 2) / 3


def _mp_step_syr():
    return _mp_log2(3) - 2


def member(spec: PredicateSpec, m: int) -> bool:
    """Decide membership of m in the set named by spec, exactly.

    m = 1 is a member of every family by the k-range collapse convention
    (log2(1) = 0 leaves only the k = 0 term, satisfied with equality).
    SYRACUSE_VARIANT is defined on odd m only; even m raises ValueError.
    """
    _require_natural(m)
    if spec.family == SYRACUSE_VARIANT and m & 1 == 0:
        raise ValueError(f"SYRACUSE_VARIANT is defined for odd m only, got m={m}")
    if m == 1:
        return True

    if spec.family == MAIN_T:
        return _band_walk(m, spec.epsilon, t_step, C.LOG2_STEP_T, _mp_step_t, _k_max(m, "range"))
    if spec.family == COL_VARIANT:
        return _band_walk(m, spec.epsilon, col_step, C.LOG2_STEP_COL, _mp_step_col, _k_max(m, "col"))
    if spec.family == SYRACUSE_VARIANT:
        return _band_walk(
            m, spec.epsilon, syracuse_step, C.LOG2_STEP_SYR, _mp_step_syr, _k_max(m, "syr")
        )
    if spec.family == REFORM_LAMBDA:
        return _member_reform(spec, m)
    if spec.family == PARITY_BAND:
        return _member_parity_band(spec, m)
    if spec.family == PARITY_WINDOW:
        return _member_parity_window(spec, m)
    if spec.family == RKM_BOUND:
        return _member_rkm(spec, m)
    raise AssertionError(spec.family)


def _member_reform(spec: PredicateSpec, m: int) -> bool:
    lam = spec.lambda_
    eps = spec.epsilon
    log2m = math.log2(m)
    idx = _floor_guarded(
        (1.0 - lam) * C.RANGE_COEFF * log2m,
        lambda: (1 - mpmath.mpf(lam)) * _mp_range_coeff() * _mp_log2(m),
    )
    v = m
    for _ in range(idx):
        v = t_step(v)
    lv = math.log2(v)
    lo_gap = lv - (lam - eps) * log2m
    if _gap_sign(
        lo_gap, lambda: _mp_log2(v) - (mpmath.mpf(lam) - mpmath.mpf(eps)) * _mp_log2(m)
    ) < 0:
        return False
    hi_gap = (lam + eps) * log2m - lv
    return _gap_sign(
        hi_gap, lambda: (mpmath.mpf(lam) + mpmath.mpf(eps)) * _mp_log2(m) - _mp_log2(v)
    ) >= 0


def _member_parity_band(spec: PredicateSpec, m: int) -> bool:
    """|sum of first k parities - k/2| <= eps * log2(m) over k <= range_coeff*log2(m)."""
    eps = spec.epsilon
    k_max = _k_max(m, "range")
    band2 = 2.0 * eps * math.log2(m)
    v = m
    twice_s = 0  # 2 * (number of odd iterates so far)
    for k in range(k_max + 1):
        dev = abs(twice_s - k)
        gap = band2 - dev
        if _gap_sign(
            gap, lambda: 2 * mpmath.mpf(eps) * _mp_log2(m) - dev
        ) < 0:
            return False
        if k < k_max:
            twice_s += 2 * (v & 1)
            v = (3 * v + 1) >> 1 if v & 1 else v >> 1
    return True


def _member_parity_window(spec: PredicateSpec, m: int) -> bool:
    """Strict band |sum - k/2| < eps*k over floor(alpha*log2 m) <= k <= floor(log2 m).

    epsilon enters a purely rational comparison here, so it is taken with
    decimal-literal semantics (Fraction(str(epsilon))) and compared exactly.
    """
    eps = Fraction(str(spec.epsilon))
    k_hi = m.bit_length() - 1
    k_lo = _floor_guarded(
        spec.alpha * math.log2(m),
        lambda: mpmath.mpf(spec.alpha) * _mp_log2(m),
    )
    v = m
    twice_s = 0
    for k in range(k_hi + 1):
        if k >= k_lo:
            # |2S - k| < 2 eps k, exactly
            if abs(twice_s - k) * eps.denominator >= 2 * eps.numerator * k:
                return False
        twice_s += 2 * (v & 1)
        v = (3 * v + 1) >> 1 if v & 1 else v >> 1
    return True


def _member_rkm(spec: PredicateSpec, m: int) -> bool:
    """Strict r(m,k) * 3^(k/2) < m^eps for all 0 <= k <= floor(log2 m)."""
    eps = spec.epsilon
    k_max = m.bit_length() - 1
    log2m = math.log2(m)
    half_log3 = C.LOG2_3 / 2.0
    r = Fraction(0)
    pow3 = 1
    v = m
    for k in range(k_max + 1):
        if r:
            fast = (
                math.log2(r.numerator)
                - math.log2(r.denominator)
                + k * half_log3
                - eps * log2m
            )
            num, den = r.numerator, r.denominator
            sign = _gap_sign(
                fast,
                lambda num=num, den=den, k=k: _mp_log2(num)
                - _mp_log2(den)
                + k * _mp_log2(3) / 2
                - mpmath.mpf(eps) * _mp_log2(m),
            )
            if sign >= 0:
                return False
        if k < k_max:
            b = v & 1
            r = r / 2
            if b:
                pow3 *= 3
                r += Fraction(1, 2 * pow3)
            v = (3 * v + 1) >> 1 if b else v >> 1
    return True


# ---------------------------------------------------------------------------
# vectorized MAIN_T counting


def _count_main_t_chunk(lo: int, hi: int, eps: float) -> tuple[int, list[int]]:
    """Count MAIN_T members in [lo, hi) in int64/float64; return borderline m too.

    Elements whose any comparison lands inside the guard band (or whose orbit
    leaves the int64-safe zone) are excluded from the fast verdict and listed
    for exact scalar resolution by the caller.
    """
    m = np.arange(lo, hi, dtype=np.int64)
    log2m = np.log2(m.astype(np.float64))
    kf = C.RANGE_COEFF * log2m
    kmax = np.floor(kf).astype(np.int64)
    border = np.minimum(kf - kmax, kmax + 1 - kf) < _GUARD
    lower0 = (1.0 - eps) * log2m
    upper0 = (1.0 + eps) * log2m
    member_mask = np.ones(m.shape, dtype=bool)
    alive_cap = kmax.copy()  # elements are stepped while k < alive_cap
    v = m.copy()
    top = int(kmax.max()) if len(kmax) else -1
    for k in range(top + 1):
        in_range = kmax >= k
        act = member_mask & in_range & ~border
        if not act.any():
            break
        lv = np.log2(v.astype(np.float64))
        lo_gap = lv - (k * C.LOG2_STEP_T + lower0)
        hi_gap = (k * C.LOG2_STEP_T + upper0) - lv
        bad = act & ((lo_gap < -_GUARD) | (hi_gap < -_GUARD))
        near = act & ~bad & ((np.abs(lo_gap) < _GUARD) | (np.abs(hi_gap) < _GUARD))
        member_mask &= ~bad
        border |= near
        step_now = member_mask & ~border & (alive_cap > k)
        if step_now.any():
            odd = (v & 1).astype(bool)
            stepped = np.where(odd, (3 * v + 1) >> 1, v >> 1)
            v = np.where(step_now, stepped, v)
            grew = step_now & (v > _SAFE_INT64)
            if grew.any():
                border |= grew
                v = np.where(grew, np.int64(1), v)
    borderline = [int(x) for x in m[border]]
    count = int((member_mask & ~border).sum())
    return count, borderline


def _count_members_scalar(spec: PredicateSpec, lo: int, hi: int) -> int:
    step = 2 if spec.family == SYRACUSE_VARIANT else 1
    start = lo if step == 1 or lo & 1 else lo + 1
    total = 0
    for m in range(start, hi, step):
        if member(spec, m):
            total += 1
    return total


@dataclass(frozen=True)
class ShellRow:
    """One shell [lo, hi) of a density report."""

    n: int
    lo: int
    hi: int
    members: int
    total: int

    @property
    def fraction(self) -> float:
        return self.members / self.total if self.total else 0.0


@dataclass(frozen=True)
class CumulativeRow:
    """Counts over [1, upto] (universe-restricted for odd-only families)."""

    upto: int
    members: int
    total: int

    @property
    def fraction(self) -> float:
        return self.members / self.total if self.total else 0.0


@dataclass
class DensityReport:
    """Shell-by-shell and cumulative member counts for one predicate."""

    label: str
    base: float
    n_max: int
    shells: list[ShellRow]
    cumulative: list[CumulativeRow]
    exact: bool = True
    unresolved: int = 0
    spec: Optional[PredicateSpec] = field(default=None, repr=False)

    def shell_csv(self) -> str:
        lines = ["shell_n,lo,hi,members,total,fraction"]
        for s in self.shells:
            lines.append(
                f"{s.n},{s.lo},{s.hi},{s.members},{s.total},{s.fraction:.12f}"
            )
        return "\n".join(lines) + "\n"

    def cumulative_csv(self) -> str:
        lines = ["N,members,fraction"]
        for c in self.cumulative:
            lines.append(f"{c.upto},{c.members},{c.fraction:.12f}")
        return "\n".join(lines) + "\n"


def _shell_bounds(base: float, n_max: int) -> list[tuple[int, int, int]]:
    """(shell index, lo, hi) triples covering [1, n_max] with [base^n, base^(n+1))."""
    if base <= 1:
        raise ValueError(f"shell base must be > 1, got {base}")
    out = []
    shell = 0
    int_base = int(base) if float(base).is_integer() else None
    while True:
        if int_base is not None:
            lo, hi = int_base**shell, int_base ** (shell + 1)
        else:
            lo, hi = math.ceil(base**shell), math.ceil(base ** (shell + 1))
        if lo > n_max:
            break
        out.append((shell, max(lo, 1), min(hi, n_max + 1)))
        shell += 1
    return out


def _universe_count(spec: PredicateSpec, lo: int, hi: int) -> int:
    if spec.family == SYRACUSE_VARIANT:
        return hi // 2 - lo // 2  # odd integers in [lo, hi)
    return hi - lo


def measure_density(
    spec: PredicateSpec,
    n_max: int,
    shell_base: float = 2.0,
    threads: Optional[int] = None,
    sample_per_shell: Optional[int] = None,
) -> DensityReport:
    """Exhaustively (default) count members of spec over [1, n_max] by shells.

    Counting is chunked over fixed-width ranges, so results are identical for
    any thread count. Exhaustive mode refuses n_max beyond 2^26; the sampling
    mode (sample_per_shell) works at any size but is labeled non-exact.
    """
    _require_natural(n_max)
    if n_max < shell_base:
        raise ValueError(
            f"N_max must be >= shell_base, got N_max={n_max}, shell_base={shell_base}"
        )
    shells = []
    cumulative = []
    cum_members = 0
    cum_total = 0
    for shell, lo, hi in _shell_bounds(shell_base, n_max):
        if sample_per_shell is None:
            members = _count_shell(spec, lo, hi, threads)
            total = _universe_count(spec, lo, hi)
        else:
            members, total = _sample_shell(spec, lo, hi, sample_per_shell)
        shells.append(ShellRow(n=shell, lo=lo, hi=hi, members=members, total=total))
        cum_members += members
        cum_total += total
        cumulative.append(
            CumulativeRow(upto=hi - 1, members=cum_members, total=cum_total)
        )
    return DensityReport(
        label=spec.label(),
        base=shell_base,
        n_max=n_max,
        shells=shells,
        cumulative=cumulative,
        exact=sample_per_shell is None,
        spec=spec,
    )


def _count_shell(spec: PredicateSpec, lo: int, hi: int, threads: Optional[int]) -> int:
    if spec.family == MAIN_T:
        eps = spec.epsilon
        results = run_chunked(
            lo, hi, 1 << 20, lambda a, b: _count_main_t_chunk(a, b, eps), threads
        )
        count = sum(r[0] for r in results)
        for _, borderline in results:
            for m in borderline:
                if member(spec, m):
                    count += 1
        return count
    results = run_chunked(
        lo, hi, 1 << 14, lambda a, b: _count_members_scalar(spec, a, b), threads
    )
    return sum(results)


def _sample_shell(spec: PredicateSpec, lo: int, hi: int, k: int) -> tuple[int, int]:
    total = _universe_count(spec, lo, hi)
    if total <= k:
        return _count_shell(spec, lo, hi, threads=1), total
    rng = np.random.default_rng(0x5EED ^ lo)
    draws = rng.integers(lo, hi, size=k)
    members = 0
    for m in draws:
        m = int(m)
        if spec.family == SYRACUSE_VARIANT:
            m |= 1
            if m >= hi:
                m -= 2
        if member(spec, m):
            members += 1
    return members, k


class FitUndefinedError(ValueError):
    """Raised when fewer than 3 shells have complement strictly inside (0, 1)."""


@dataclass(frozen=True)
class StarFit:
    """Power-law fit of the complement: 1 - fraction(N) ~ C / N^D."""

    C: float
    D: float
    residual: float
    points_used: int

    def to_json(self) -> str:
        import json

        return json.dumps(
            {"C": self.C, "D": self.D, "residual": self.residual}, sort_keys=True
        )


def fit_star_density(report: DensityReport) -> StarFit:
    """Least squares of log(shell complement) against log N at shell right-endpoints.

    Only shells whose complement fraction lies strictly between 0 and 1
    contribute (all-member and member-free shells carry no power-law
    information). D = -slope; a decaying complement gives D in (0, 1] in the
    regime the fit is meant for, but whatever the data says is returned.
    """
    xs = []
    ys = []
    for row in report.shells:
        if not 0 < row.members < row.total:
            continue
        complement = (row.total - row.members) / row.total
        xs.append(math.log(row.hi))
        ys.append(math.log(complement))
    if len(xs) < 3:
        raise FitUndefinedError(
            f"fit needs >= 3 shells with complement strictly between 0 and 1, "
            f"have {len(xs)}"
        )
    x = np.asarray(xs)
    y = np.asarray(ys)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return StarFit(
        C=float(math.exp(intercept)),
        D=float(-slope),
        residual=float(np.sqrt(np.mean(resid**2))),
        points_used=len(xs),
    )


@dataclass(frozen=True)
class HoeffdingCheck:
    """Exact parity-concentration violation fraction vs its exponential bound."""

    a: int
    b: int
    N: int
    epsilon: float
    violations: int
    total: int
    bound: float

    @property
    def empirical(self) -> float:
        return self.violations / self.total

    @property
    def passed(self) -> bool:
        return self.empirical <= self.bound


def hoeffding_check(a: int, b: int, N: int, epsilon: float) -> HoeffdingCheck:
    """Count m in [a, b) with |sum of first N parities - N/2| >= epsilon*N, exactly.

    Preconditions: 1 <= a < b, 0 <= N <= ceil(log2(b - a)), epsilon > 0.
    epsilon is taken with decimal-literal semantics (Fraction(str(epsilon))),
    making the threshold comparison exact integer arithmetic. N = 0 is the
    degenerate allowed case: every m violates and the bound is 4.
    """
    _require_natural(a)
    if not isinstance(b, int) or b <= a:
        raise ValueError(f"need integers 1 <= a < b, got a={a}, b={b}")
    width = b - a
    n_cap = (width - 1).bit_length()  # ceil(log2(width))
    if not isinstance(N, int) or not 0 <= N <= n_cap:
        raise ValueError(
            f"N must satisfy 0 <= N <= ceil(log2(b-a)) = {n_cap}, got N={N}"
        )
    eps = Fraction(str(epsilon))
    if eps <= 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")

    violations = 0
    for lo, hi in chunk_spans(a, b, 1 << 22):
        violations += _hoeffding_chunk(lo, hi, N, eps)
    bound = 4.0 * math.exp(-2.0 * float(eps) ** 2 * N)
    return HoeffdingCheck(
        a=a, b=b, N=N, epsilon=float(eps), violations=violations,
        total=width, bound=bound,
    )


def _hoeffding_chunk(lo: int, hi: int, N: int, eps: Fraction) -> int:
    # |2S - N| >= 2 eps N  <=>  den*|2S - N| >= 2*num*N, all integers.
    threshold = 2 * eps.numerator * N
    vmax_bound = ((hi + 1) * 3**N >> N) * 3 + 1 if N else hi
    if vmax_bound < (1 << 63):
        v = np.arange(lo, hi, dtype=np.int64)
        twice_s = np.zeros(hi - lo, dtype=np.int64)
        for _ in range(N):
            odd = (v & 1).astype(bool)
            twice_s += 2 * odd
            v = np.where(odd, (3 * v + 1) >> 1, v >> 1)
        dev = np.abs(twice_s - N) * eps.denominator
        return int((dev >= threshold).sum())
    count = 0
    for m in range(lo, hi):
        v = m
        s2 = 0
        for _ in range(N):
            if v & 1:
                s2 += 2
                v = (3 * v + 1) >> 1
            else:
                v >>= 1
        if abs(s2 - N) * eps.denominator >= threshold:
            count += 1
    return count


@dataclass(frozen=True)
class ProfileRow:
    """One lambda of a reform profile: the indexed iterate vs its bracket."""

    lambda_: float
    k: int
    iterate: int
    log2_lower: float
    log2_upper: float
    within: bool


def reform_profile(m: int, lambda_grid, epsilon: float) -> list[ProfileRow]:
    """Tabulate iterate_{floor((1-lambda) range_coeff log2 m)}(m) against m^(lambda +- eps)."""
    _require_natural(m)
    if m < 2:
        raise ValueError(f"reform_profile requires m >= 2, got m={m}")
    if not (epsilon > 0):
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    log2m = math.log2(m)
    rows = []
    for lam in lambda_grid:
        lam = float(lam)
        if not 0.0 <= lam <= 1.0:
            raise ValueError(f"lambda must lie in [0, 1], got {lam}")
        spec = PredicateSpec(family=REFORM_LAMBDA, epsilon=epsilon, lambda_=lam)
        idx = _floor_guarded(
            (1.0 - lam) * C.RANGE_COEFF * log2m,
            lambda: (1 - mpmath.mpf(lam)) * _mp_range_coeff() * _mp_log2(m),
        )
        v = m
        for _ in range(idx):
            v = t_step(v)
        rows.append(
            ProfileRow(
                lambda_=lam,
                k=idx,
                iterate=v,
                log2_lower=(lam - epsilon) * log2m,
                log2_upper=(lam + epsilon) * log2m,
                within=member(spec, m),
            )
        )
    return rows
