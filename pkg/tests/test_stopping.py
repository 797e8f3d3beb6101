"""Range tau computation, averages, exceedance and threshold densities."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collatz_lab.maps import t_step, tau
from collatz_lab.step_tables import get_table
from collatz_lab.stopping import (
    SIEVE_BITS,
    _exceeds,
    _floor_power_exact,
    compute_tau_range,
    default_checkpoints,
    tau_average,
    tau_exceedance_density,
    tau_ratio_histogram,
    tau_sieve,
    tmin_threshold_density,
)

# hand-walked halved-odd orbits, m = 1..10
TAU_SMALL = [0, 1, 5, 2, 4, 6, 11, 3, 13, 5]


# ---------------------------------------------------------------------------
# sieve and range engine


def test_sieve_shape_and_anchors():
    s = tau_sieve()
    assert s.size == 1 << SIEVE_BITS
    assert s[0] == -1
    assert list(s[1:11]) == TAU_SMALL


def test_sieve_matches_scalar_walk():
    s = tau_sieve()
    for m in range(1, 1 << SIEVE_BITS, 977):
        assert s[m] == tau(m)
    assert s[(1 << SIEVE_BITS) - 1] == tau((1 << SIEVE_BITS) - 1)


def test_compute_tau_range_against_scalar():
    t16 = get_table(16)
    taus, unres = compute_tau_range(1, 5000, table=t16)
    assert not unres.any()
    for m in range(1, 5000, 131):
        assert taus[m - 1] == tau(m)


def test_compute_tau_range_table_and_plain_agree():
    t16 = get_table(16)
    a, ua = compute_tau_range(70000, 72000, table=t16)
    b, ub = compute_tau_range(70000, 72000, table=None)
    assert np.array_equal(a, b)
    assert np.array_equal(ua, ub)
    assert not ua.any()


def test_compute_tau_range_budget_edges():
    # tau(27) = 70: one step short leaves it unresolved, exactly enough does not
    taus, unres = compute_tau_range(27, 28, budget=69)
    assert unres[0] and taus[0] == 0
    taus, unres = compute_tau_range(27, 28, budget=70)
    assert not unres[0] and taus[0] == 70
    taus, unres = compute_tau_range(27, 28, budget=71)
    assert not unres[0] and taus[0] == 70


def test_compute_tau_range_empty_and_validation():
    taus, unres = compute_tau_range(5, 5)
    assert taus.size == 0 and unres.size == 0
    with pytest.raises(ValueError):
        compute_tau_range(0, 10)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=10**9))
def test_compute_tau_range_single_matches_scalar(m):
    t16 = get_table(16)
    taus, unres = compute_tau_range(m, m + 1, table=t16)
    assert not unres[0]
    assert taus[0] == tau(m)


# ---------------------------------------------------------------------------
# tau_average


def test_default_checkpoints():
    assert default_checkpoints(100) == [1, 2, 4, 8, 10, 16, 32, 64, 100]
    assert default_checkpoints(2) == [1, 2]


def test_tau_average_small_exact():
    s = tau_average(10)
    assert s.sum_tau == sum(TAU_SMALL)  # 50
    assert s.unresolved == 0
    assert s.floor_violations == 0
    rows = [(r.x, r.sum_tau, r.unresolved) for r in s.checkpoints]
    assert rows == [(1, 0, 0), (2, 1, 0), (4, 8, 0), (8, 32, 0), (10, 50, 0)]


def test_tau_average_csv_format():
    text = tau_average(10).to_csv()
    lines = text.strip().split("\n")
    assert lines[0] == "x,sum_tau,normalized,unresolved"
    assert lines[1] == "1,0,0.000000000000,0"
    assert lines[2] == "2,1,0.500000000000,0"
    assert lines[3] == "4,8,1.000000000000,0"
    assert lines[4] == "8,32,1.333333333333,0"
    # 50 / (10 * log2 10) = 1.5051499783...
    assert lines[5].startswith("10,50,1.505149978") and lines[5].endswith(",0")


def test_tau_average_frozen_thousand():
    s = tau_average(1000)
    assert s.sum_tau == 39889
    assert s.unresolved == 0
    assert s.floor_violations == 0
    # independent route: scalar orbit walks
    assert s.sum_tau == sum(tau(m) for m in range(1, 1001))


def test_tau_average_validation():
    with pytest.raises(ValueError, match="x >= 2"):
        tau_average(1)
    with pytest.raises(ValueError, match="budget"):
        tau_average(100, budget=-1)
    with pytest.raises(ValueError, match="checkpoints"):
        tau_average(10, checkpoints=[0])
    with pytest.raises(ValueError, match="checkpoints"):
        tau_average(10, checkpoints=[11])


def test_tau_average_custom_checkpoints():
    s = tau_average(10, checkpoints=[5, 5, 3])
    assert [(r.x, r.sum_tau) for r in s.checkpoints] == [(3, 6), (5, 12)]


def test_tau_average_budget_matches_scalar():
    s = tau_average(30, budget=10)
    resolved = [tau(m, budget=10) for m in range(1, 31)]
    assert s.unresolved == sum(1 for t in resolved if t is None)
    assert s.sum_tau == sum(t for t in resolved if t is not None)
    assert s.unresolved > 0


def test_tau_average_checkpoint_crosses_chunks():
    # 2^16 is both a default checkpoint and the chunk boundary
    big = tau_average(70000, use_table=True)
    at_2_16 = next(r for r in big.checkpoints if r.x == 65536)
    small = tau_average(65536)
    assert at_2_16.sum_tau == small.sum_tau
    assert big.used_table and small.used_table


def test_tau_average_no_table_same_answer():
    a = tau_average(4000, use_table=True)
    b = tau_average(4000, use_table=False)
    assert a.sum_tau == b.sum_tau
    assert not b.used_table


def test_tau_average_thread_determinism():
    a = tau_average(200000, threads=1)
    b = tau_average(200000, threads=3)
    assert a.to_csv() == b.to_csv()
    assert a.sum_tau == b.sum_tau


def test_normalized_values():
    s = tau_average(1000)
    assert s.normalized == pytest.approx(39889 / (1000 * math.log2(1000)))
    assert s.checkpoints[0].normalized == 0.0  # x = 1 row


# ---------------------------------------------------------------------------
# exceedance density


def test_exceeds_tie_is_not_membership():
    # tau(2^j) = j, so alpha = 1 sits exactly on the boundary
    assert not _exceeds(2, 4, 1.0)
    assert not _exceeds(0, 1, 0.0)
    assert _exceeds(3, 4, 1.0)
    assert _exceeds(1, 2, 0.0)


def test_exceedance_alpha_zero():
    rep = tau_exceedance_density(0.0, 63)
    # every m >= 2 has tau >= 1 > 0; m = 1 has tau = 0
    assert [s.members for s in rep.shells] == [0, 2, 4, 8, 16, 32]
    assert rep.unresolved == 0


def test_exceedance_alpha_one_small():
    rep = tau_exceedance_density(1.0, 4)
    assert [(s.members, s.total) for s in rep.shells] == [(0, 1), (1, 2), (0, 1)]


def test_exceedance_against_scalar():
    import mpmath

    rep = tau_exceedance_density(3.5, 512)
    shells = {s.n: s.members for s in rep.shells}
    for n, lo, hi in [(3, 8, 16), (6, 64, 128), (9, 512, 513)]:
        expected = 0
        for m in range(lo, hi):
            with mpmath.workdps(50):
                gap = tau(m) - mpmath.mpf(3.5) * mpmath.log(m, 2)
                assert abs(gap) > mpmath.mpf("1e-30") or gap == 0
                if gap > 0:
                    expected += 1
        assert shells[n] == expected, f"shell {n}"


def test_exceedance_monotone_in_alpha():
    reps = [tau_exceedance_density(a, 1023) for a in (0.0, 2.0, 6.0)]
    for tight, loose in zip(reps[1:], reps):
        for s_tight, s_loose in zip(tight.shells, loose.shells):
            assert s_tight.members <= s_loose.members


def test_exceedance_validation():
    with pytest.raises(ValueError, match="alpha"):
        tau_exceedance_density(-0.5, 100)
    with pytest.raises(ValueError):
        tau_exceedance_density(1.0, 0)


def test_exceedance_cumulative_consistency():
    rep = tau_exceedance_density(4.0, 255)
    assert rep.cumulative[-1].members == sum(s.members for s in rep.shells)
    assert rep.cumulative[-1].total == 255


# ---------------------------------------------------------------------------
# threshold (dip below m^theta) density


def test_floor_power_exact():
    assert _floor_power_exact(10**6, Fraction(1, 3), 99.999999) == 100
    assert _floor_power_exact(8, Fraction(2, 3), 4.0) == 4
    assert _floor_power_exact(16, Fraction(1, 2), 1.0) == 4  # climbs from a bad hint
    assert _floor_power_exact(17, Fraction(1, 2), 4.123) == 4
    assert _floor_power_exact(2, Fraction(3, 1), 8.0) == 8


def test_tmin_theta_one_everything_qualifies():
    rep = tmin_threshold_density(1.0, 63)
    assert all(s.members == s.total for s in rep.shells)
    assert rep.unresolved == 0


def test_tmin_against_scalar():
    theta = 0.5
    rep = tmin_threshold_density(theta, 2000)
    shells = {s.n: (s.lo, s.hi, s.members) for s in rep.shells}
    for n in (4, 7, 10):
        lo, hi, got = shells[n]
        expected = 0
        for m in range(lo, hi):
            thr = math.isqrt(m)
            v = m
            for _ in range(10**6):
                if v <= thr:
                    expected += 1
                    break
                v = t_step(v)
            else:
                raise AssertionError("budget too small for test range")
        assert got == expected, f"shell {n}"


def test_tmin_table_and_plain_agree():
    a = tmin_threshold_density(0.5, 2**17 - 1, use_table=True)
    b = tmin_threshold_density(0.5, 2**17 - 1, use_table=False)
    assert [s.members for s in a.shells] == [s.members for s in b.shells]


def test_tmin_zero_budget():
    rep = tmin_threshold_density(0.5, 31, budget=0)
    # only m = 1 satisfies m <= floor(sqrt(m)) at step 0; the rest cannot move
    assert [s.members for s in rep.shells] == [1, 0, 0, 0, 0]
    assert rep.unresolved == 30


def test_tmin_validation():
    with pytest.raises(ValueError, match="theta"):
        tmin_threshold_density(0.0, 100)
    with pytest.raises(ValueError, match="theta"):
        tmin_threshold_density(-1.0, 100)


def test_tmin_thread_determinism():
    a = tmin_threshold_density(0.9, 2**15 - 1, threads=1)
    b = tmin_threshold_density(0.9, 2**15 - 1, threads=4)
    assert a.shell_csv() == b.shell_csv()


# ---------------------------------------------------------------------------
# ratio histogram


def test_histogram_hand_counts():
    h = tau_ratio_histogram(16, bucket_width=0.5)
    assert h.counts == {2: 4, 3: 4, 4: 1, 5: 1, 6: 3, 7: 1, 8: 1}
    assert h.total == 15
    assert h.unresolved == 0
    assert h.bucket_edges(2) == (1.0, 1.5)


def test_histogram_powers_of_two_land_on_left_edge():
    # ratio is exactly 1.0 there; the nudge keeps it in bucket [1.0, 1.5)
    h = tau_ratio_histogram(2**12, bucket_width=0.5)
    m_on_edge = [1 << j for j in range(1, 13)]
    bucket2_members = sum(
        1 for m in range(2, 2**12 + 1) if math.floor(tau(m) / math.log2(m) / 0.5 + 1e-9) == 2
    )
    assert h.counts[2] == bucket2_members
    assert bucket2_members >= len(m_on_edge)


def test_histogram_minimal():
    h = tau_ratio_histogram(2)
    assert h.counts == {2: 1}
    assert h.total == 1


def test_histogram_validation():
    with pytest.raises(ValueError, match="n_max"):
        tau_ratio_histogram(1)
    with pytest.raises(ValueError, match="bucket_width"):
        tau_ratio_histogram(100, bucket_width=0.0)


def test_histogram_thread_determinism():
    a = tau_ratio_histogram(70000, threads=1)
    b = tau_ratio_histogram(70000, threads=2)
    assert a.counts == b.counts
    assert a.total == b.total
