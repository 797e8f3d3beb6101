"""Closed-form iterate identities for the halved-odd map, in exact rationals.

The k-th iterate of t_step factors through the parity sequence
p_0, p_1, ... (p_i = parity of the i-th iterate): with S_k = p_0 + ... + p_{k-1},

    iterate_k(m) = (m / 2^k + r(m, k)) * 3^S_k

where the remainder term collects one summand per odd step,

    r(m, k) = sum over i < k of  p_i / (3^(p_0+...+p_i) * 2^(k-i)).

r(m, k) always lies in [0, 1), is built here with general Fraction arithmetic
(denominators happen to be of the form 3^a * 2^b, but nothing below exploits
that), and satisfies an exact split across a cut of the step window:

    r(m, k0+k) = r(m, k0) / 2^k + r(iterate_k0(m), k) / 3^S_k0.

No floating point is used anywhere in this module.
"""

from __future__ import annotations

from fractions import Fraction

from .maps import _require_natural, t_step

# The exact rational type used throughout: always reduced, denominator > 0.
ExactRational = Fraction


def parity_vector(m: int, k: int) -> tuple[int, ...]:
    """First k parity bits of the t_step orbit of m: bit i is iterate_i(m) mod 2."""
    _require_natural(m)
    _require_window(k)
    bits = []
    v = m
    for _ in range(k):
        b = v & 1
        bits.append(b)
        v = (3 * v + 1) >> 1 if b else v >> 1
    return tuple(bits)


def parity_ones(m: int, k: int) -> int:
    """Number of odd iterates among the first k, i.e. sum of parity_vector(m, k)."""
    return sum(parity_vector(m, k))


def r_k(m: int, k: int) -> Fraction:
    """The remainder term r(m, k) as an exact reduced rational in [0, 1)."""
    _require_natural(m)
    _require_window(k)
    return _r_sequence_last(m, k)


def r_sequence(m: int, k_max: int) -> list[Fraction]:
    """[r(m, 0), r(m, 1), ..., r(m, k_max)] built incrementally, all exact.

    One odd step extends the sum by a single term; one even step only deepens
    the powers of 2, which is the recurrence used here:
        r(m, k+1) = r(m, k)/2            if p_k = 0
        r(m, k+1) = r(m, k)/2 + 1/(3^(S_k+1) * 2)   if p_k = 1.
    """
    _require_natural(m)
    _require_window(k_max)
    out = [Fraction(0)]
    r = Fraction(0)
    pow3 = 1  # 3^S_k
    v = m
    for _ in range(k_max):
        b = v & 1
        r = r / 2
        if b:
            pow3 *= 3
            r += Fraction(1, 2 * pow3)
        out.append(r)
        v = (3 * v + 1) >> 1 if b else v >> 1
    return out


def _r_sequence_last(m: int, k: int) -> Fraction:
    r = Fraction(0)
    pow3 = 1
    v = m
    for _ in range(k):
        b = v & 1
        r = r / 2
        if b:
            pow3 *= 3
            r += Fraction(1, 2 * pow3)
        v = (3 * v + 1) >> 1 if b else v >> 1
    return r


def closed_form_iterate(m: int, k: int) -> int:
    """Evaluate the k-th iterate of t_step through the closed form.

    Computes (m/2^k + r(m, k)) * 3^S_k in exact rational arithmetic and
    returns it as an int. A non-integral result would mean the identity
    itself is broken, so that raises ArithmeticError rather than ValueError.
    """
    _require_natural(m)
    _require_window(k)
    r = Fraction(0)
    pow3 = 1
    v = m
    for _ in range(k):
        b = v & 1
        r = r / 2
        if b:
            pow3 *= 3
            r += Fraction(1, 2 * pow3)
        v = (3 * v + 1) >> 1 if b else v >> 1
    value = (Fraction(m, 1 << k) + r) * pow3
    if value.denominator != 1:
        raise ArithmeticError(
            f"closed form produced non-integer {value} at m={m}, k={k}"
        )
    return int(value)


def iterate_sequence(m: int, k_max: int) -> list[int]:
    """[iterate_0(m), ..., iterate_k_max(m)] evaluated via the closed form.

    Every entry comes from the rational formula, not from stepping the map;
    callers that want the map itself should use maps.orbit. Raises
    ArithmeticError if any entry fails to be an integer.
    """
    _require_natural(m)
    _require_window(k_max)
    out = []
    r = Fraction(0)
    pow3 = 1
    v = m
    for k in range(k_max + 1):
        value = (Fraction(m, 1 << k) + r) * pow3
        if value.denominator != 1:
            raise ArithmeticError(
                f"closed form produced non-integer {value} at m={m}, k={k}"
            )
        out.append(int(value))
        b = v & 1
        r = r / 2
        if b:
            pow3 *= 3
            r += Fraction(1, 2 * pow3)
        v = (3 * v + 1) >> 1 if b else v >> 1
    return out


def verify_split_identity(m: int, k: int, k0: int) -> bool:
    """Exactly check r(m, k0+k) == r(m, k0)/2^k + r(iterate_k0(m), k)/3^S_k0."""
    _require_natural(m)
    _require_window(k)
    _require_window(k0)
    left = r_k(m, k0 + k)
    mid = m
    for _ in range(k0):
        mid = t_step(mid)
    s_k0 = parity_ones(m, k0)
    right = r_k(m, k0) / (1 << k) + r_k(mid, k) / (3**s_k0)
    return left == right


def closed_form_sweep(m_max: int, k_max: int) -> tuple[int, int]:
    """Compare iterate_sequence against direct t_step orbits for every m <= m_max.

    Returns (checks, failures); failures should be 0. Exact integer equality
    at every 0 <= k <= k_max.
    """
    _require_natural(m_max)
    _require_window(k_max)
    checks = 0
    failures = 0
    for m in range(1, m_max + 1):
        closed = iterate_sequence(m, k_max)
        v = m
        for k in range(k_max + 1):
            checks += 1
            if closed[k] != v:
                failures += 1
            v = (3 * v + 1) >> 1 if v & 1 else v >> 1
    return checks, failures


def r_bounds_sweep(m_max: int, k_max: int) -> tuple[int, int]:
    """Check 0 <= r(m, k) < 1 exactly for every m <= m_max, k <= k_max.

    Returns (checks, failures).
    """
    _require_natural(m_max)
    _require_window(k_max)
    checks = 0
    failures = 0
    for m in range(1, m_max + 1):
        for r in r_sequence(m, k_max):
            checks += 1
            if not (0 <= r < 1):
                failures += 1
    return checks, failures


def split_identity_sweep(m_max: int, k_cap: int) -> tuple[int, int]:
    """Exactly verify the split identity for every m <= m_max, k, k0 <= k_cap.

    Returns (checks, failures). Prefix data (orbit values, parity sums,
    remainder terms) is computed once per m; each cut point k0 then walks its
    own suffix remainders so both sides of the identity come from independent
    evaluations.
    """
    _require_natural(m_max)
    _require_window(k_cap)
    checks = 0
    failures = 0
    for m in range(1, m_max + 1):
        prefix_r = r_sequence(m, 2 * k_cap)
        values = [m]
        v = m
        pow3_prefix = [1]
        p3 = 1
        for _ in range(k_cap):
            if v & 1:
                p3 *= 3
            v = (3 * v + 1) >> 1 if v & 1 else v >> 1
            values.append(v)
            pow3_prefix.append(p3)
        for k0 in range(k_cap + 1):
            base = prefix_r[k0]
            scale = pow3_prefix[k0]
            suffix_r = Fraction(0)
            suffix_pow3 = 1
            w = values[k0]
            # k = 0 case: r(m, k0) == r(m, k0) + 0, trivially exact.
            checks += 1
            if prefix_r[k0] != base + Fraction(0):
                failures += 1
            for k in range(1, k_cap + 1):
                b = w & 1
                suffix_r = suffix_r / 2
                if b:
                    suffix_pow3 *= 3
                    suffix_r += Fraction(1, 2 * suffix_pow3)
                w = (3 * w + 1) >> 1 if b else w >> 1
                checks += 1
                if prefix_r[k0 + k] != base / (1 << k) + suffix_r / scale:
                    failures += 1
    return checks, failures


def _require_window(k) -> None:
    if not isinstance(k, int) or isinstance(k, bool):
        raise ValueError(f"step count must be an int, got {type(k).__name__}")
    if k < 0:
        raise ValueError(f"step count must be >= 0, got {k}")
