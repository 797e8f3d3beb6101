# Residue-class tables: n steps of the halved-odd map in one affine evaluation.
#
# Every m in the same class mod 2^n shares its first n parity decisions, so
# those n steps collapse to m -> (3^c * m + d) >> n with (c, d) looked up by
# the low n bits.

import time

from collatz_lab import (
    advance_array,
    batch_advance,
    bench_throughput,
    build_table,
    census_on_interval,
    get_table,
    parity_census,
    t_step,
)

import numpy as np


def show_small_table():
    table = build_table(4)
    print("table for n=4 (one entry per residue mod 16):")
    print("  residue   c   d")
    for r in range(table.size):
        step = table.entry(r)
        print(f"  {r:>7}  {step.c:>2}  {step.d:>4}")


def check_against_single_steps():
    table = build_table(8)
    worst = 0
    for m in list(range(1, 50)) + [12345, 10**9 + 7, 2**80 + 1]:
        v = m
        for _ in range(table.n):
            v = t_step(v)
        jumped = batch_advance(m, table)
        assert jumped == v, (m, jumped, v)
        worst = max(worst, v)
    print(f"batch_advance == {table.n} single steps for every probe (max iterate {worst})")


def vector_lane():
    table = get_table(16)
    values = np.arange(1, 10_001, dtype=np.int64)
    vec = advance_array(values, table)
    spot = [int(batch_advance(int(m), table)) for m in values[::997]]
    assert spot == [int(x) for x in vec[::997]]
    print(f"advance_array agrees with batch_advance on {len(values)} values (n=16)")


def census():
    for n in (4, 8, 12):
        res = parity_census(n)
        tag = "uniform" if res.uniform else "NOT uniform"
        print(f"  n={n:<2} {res.distinct}/{res.total} parity vectors, {tag}")
    shifted = census_on_interval(123457, 10)
    print(f"  shifted window at 123457, n=10: uniform={shifted.uniform}")


def mini_bench():
    table = get_table(16)
    rep = bench_throughput(table, 1_000_000)
    print(f"  scalar {rep.scalar_steps_per_sec / 1e6:7.2f} M steps/s")
    print(f"  vector {rep.vector_steps_per_sec / 1e6:7.2f} M steps/s")
    print(f"  batch  {rep.batch_steps_per_sec / 1e6:7.2f} M steps/s "
          f"({rep.speedup_vs_scalar:.1f}x scalar)")


def main():
    show_small_table()
    print()
    check_against_single_steps()
    vector_lane()
    print()
    print("every parity pattern shows up exactly once per window:")
    census()
    print()
    t0 = time.perf_counter()
    print("throughput on a million mixed-orbit steps:")
    mini_bench()
    print(f"  (bench took {time.perf_counter() - t0:.1f}s wall)")


if __name__ == "__main__":
    main()
