# How tightly do the first N parity bits concentrate around N/2?
#
# Over any window of consecutive starting values the deviation |S - N/2| is
# governed by an exponential tail bound. The empirical violation fraction is
# counted exactly (integer threshold, no float comparisons) and set against
# that bound.

from collatz_lab import hoeffding_check


def grid(a, width):
    b = a + width
    print(f"window [{a}, {b}), exact counts:")
    print("   N   eps    violations      empirical        bound")
    for n_steps in (4, 8, 12, 16):
        for eps in (0.1, 0.25, 0.5):
            chk = hoeffding_check(a, b, n_steps, eps)
            flag = "" if chk.passed else "  <-- exceeds!"
            print(
                f"  {n_steps:>2}  {eps:>4}  {chk.violations:>7}/{chk.total}"
                f"  {chk.empirical:.9f}  {chk.bound:.9f}{flag}"
            )


def translation():
    # the violation count only depends on the window width, not its position
    base = hoeffding_check(1, 1 + 2**12, 10, 0.25)
    far = hoeffding_check(10**12, 10**12 + 2**12, 10, 0.25)
    print("translation invariance, width 4096, N=10, eps=0.25:")
    print(f"  at 1:     {base.violations} violations")
    print(f"  at 10^12: {far.violations} violations")
    assert base.violations == far.violations


def main():
    grid(1, 2**16)
    print()
    translation()


if __name__ == "__main__":
    main()
