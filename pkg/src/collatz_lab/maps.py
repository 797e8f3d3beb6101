"""Exact single-step maps and orbit drivers.

All arithmetic is plain Python int, so values never overflow or round. The
three concrete maps are

    t_step(m)        = m/2 if m even, (3m+1)/2 if m odd
    col_step(m)      = m/2 if m even, 3m+1 if m odd
    syracuse_step(m) = (3m+1) / 2^nu2(3m+1), odd m only

plus a residue-programmed family (GeneralizedMap) that divides by a fixed
modulus p after an affine move chosen by m mod p.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

DEFAULT_BUDGET = 10**6

MAP_T = "t"
MAP_COL = "col"
MAP_SYR = "syr"


def t_step(m: int) -> int:
    """One halved-odd step: m -> m/2 (even) or (3m+1)/2 (odd). m >= 1."""
    _require_natural(m)
    return (3 * m + 1) >> 1 if m & 1 else m >> 1


def col_step(m: int) -> int:
    """One classic step: m -> m/2 (even) or 3m+1 (odd). m >= 1."""
    _require_natural(m)
    return 3 * m + 1 if m & 1 else m >> 1


def nu2(m: int) -> int:
    """2-adic valuation: the exponent of the largest power of 2 dividing m >= 1."""
    _require_natural(m)
    return (m & -m).bit_length() - 1


def syracuse_step(m: int) -> int:
    """Odd-to-odd step: (3m+1) with all factors of 2 removed. Requires odd m >= 1."""
    _require_natural(m)
    if m & 1 == 0:
        raise ValueError(f"syracuse_step requires odd m, got m={m}")
    t = 3 * m + 1
    return t >> nu2(t)


@dataclass(frozen=True)
class GeneralizedMap:
    """Residue-programmed map: m -> (q[i]*m + k[i]) / p where i = m mod p.

    Integrality for every m in the class is equivalent to the residue
    condition q[i]*i + k[i] = 0 (mod p), checked at construction.
    """

    p: int
    q: tuple[int, ...]
    k: tuple[int, ...]

    def __post_init__(self):
        if self.p < 1:
            raise ValueError(f"modulus p must be >= 1, got p={self.p}")
        object.__setattr__(self, "q", tuple(self.q))
        object.__setattr__(self, "k", tuple(self.k))
        if len(self.q) != self.p or len(self.k) != self.p:
            raise ValueError(
                f"need exactly p={self.p} multipliers and offsets, "
                f"got {len(self.q)} and {len(self.k)}"
            )
        for i, (qi, ki) in enumerate(zip(self.q, self.k)):
            if qi < 1:
                raise ValueError(f"multiplier q[{i}]={qi} must be >= 1")
            if (qi * i + ki) % self.p != 0:
                raise ValueError(
                    f"residue condition violated at i={i}: "
                    f"q[i]*i + k[i] = {qi * i + ki} is not divisible by p={self.p}"
                )

    def step(self, m: int) -> int:
        i = m % self.p
        num = self.q[i] * m + self.k[i]
        # The residue condition makes num divisible by p for every m = i (mod p).
        return num // self.p


def generalized_step(gmap: GeneralizedMap, m: int) -> int:
    """Apply one step of a GeneralizedMap. Defined for any integer m."""
    return gmap.step(m)


MapKind = Union[str, GeneralizedMap]


@dataclass(frozen=True)
class OrbitRecord:
    """Summary of a finite orbit prefix.

    tau is the index of the first 1 when one was seen, else None.
    parity_ones counts odd iterates among the steps taken (t-map only).
    values holds the full trace (start included) only when requested.
    """

    start: int
    map_kind: str
    steps_taken: int
    reached_one: bool
    tau: Optional[int]
    max_value: int
    parity_ones: Optional[int]
    values: Optional[tuple[int, ...]] = None


class TMinResult(NamedTuple):
    """Observed orbit minimum; exact only when the orbit reached 1 in budget."""

    value: int
    exact: bool


def _require_natural(m) -> None:
    if not isinstance(m, int) or isinstance(m, bool):
        raise ValueError(f"m must be an int, got {type(m).__name__}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got m={m}")


def _step_fn(map_kind: MapKind):
    if isinstance(map_kind, GeneralizedMap):
        return map_kind.step, "generalized"
    if map_kind == MAP_T:
        return t_step, MAP_T
    if map_kind == MAP_COL:
        return col_step, MAP_COL
    if map_kind == MAP_SYR:
        return syracuse_step, MAP_SYR
    raise ValueError(f"unknown map kind {map_kind!r}; expected t, col, syr, or a GeneralizedMap")


def orbit(
    map_kind: MapKind,
    m: int,
    max_steps: int = DEFAULT_BUDGET,
    stop_at_one: bool = True,
    trace: bool = False,
) -> OrbitRecord:
    """Iterate the chosen map from m and summarize what happened.

    With stop_at_one the walk ends at the first 1 (tau = steps taken); without
    it the walk runs exactly max_steps and still records the first 1 if any.
    A walk that exhausts max_steps before reaching 1 reports reached_one=False
    and tau=None; that is the representation of a budget-exhausted (possibly
    divergent) orbit.
    """
    step, kind_label = _step_fn(map_kind)
    if isinstance(map_kind, GeneralizedMap):
        if not isinstance(m, int) or isinstance(m, bool):
            raise ValueError(f"m must be an int, got {type(m).__name__}")
    else:
        _require_natural(m)
        if kind_label == MAP_SYR and m & 1 == 0:
            raise ValueError(f"syracuse orbits require odd m, got m={m}")
    if max_steps < 0:
        raise ValueError(f"max_steps must be >= 0, got {max_steps}")

    track_parity = kind_label == MAP_T
    v = m
    steps = 0
    first_one = 0 if v == 1 else None
    max_value = v
    ones = 0
    values = [v] if trace else None

    while steps < max_steps:
        if stop_at_one and v == 1:
            break
        if track_parity:
            ones += v & 1
        v = step(v)
        steps += 1
        if v > max_value:
            max_value = v
        if values is not None:
            values.append(v)
        if first_one is None and v == 1:
            first_one = steps

    return OrbitRecord(
        start=m,
        map_kind=kind_label,
        steps_taken=steps,
        reached_one=first_one is not None,
        tau=first_one,
        max_value=max_value,
        parity_ones=ones if track_parity else None,
        values=tuple(values) if values is not None else None,
    )


def tau(m: int, budget: int = DEFAULT_BUDGET) -> Optional[int]:
    """Steps of t_step from m to the first 1, or None if budget runs out."""
    _require_natural(m)
    v = m
    steps = 0
    while v != 1:
        if steps >= budget:
            return None
        v = (3 * v + 1) >> 1 if v & 1 else v >> 1
        steps += 1
    return steps


def t_min(m: int, budget: int = DEFAULT_BUDGET) -> TMinResult:
    """Minimum t_step orbit value seen within budget.

    Exact when the orbit reached 1 (the true infimum of any orbit through 1);
    otherwise the observed minimum is only an upper bound for the limit and is
    flagged non-exact.
    """
    _require_natural(m)
    v = m
    lowest = m
    for _ in range(budget):
        if v == 1:
            break
        v = (3 * v + 1) >> 1 if v & 1 else v >> 1
        if v < lowest:
            lowest = v
    return TMinResult(value=lowest, exact=v == 1 or lowest == 1)
