# The k-th halved-odd iterate in closed form.
#
# Writing S for the number of odd values among the first k iterates, the
# identity is
#
#     iterate_k(m) = (m / 2^k + r_k(m)) * 3^S
#
# with an exact rational remainder 0 <= r_k(m) < 1. Everything below is
# computed in exact arithmetic, no floats, so "equal" means equal.

from fractions import Fraction

from collatz_lab import (
    closed_form_iterate,
    orbit,
    parity_ones,
    parity_vector,
    r_k,
    r_sequence,
    verify_split_identity,
)


def demo_identity(m, k):
    direct = orbit("t", m, max_steps=k, stop_at_one=False, trace=True).values[-1]
    s = parity_ones(m, k)
    r = r_k(m, k)
    rebuilt = (Fraction(m, 2**k) + r) * 3**s
    print(f"m={m}, k={k}")
    print(f"  parity bits     {''.join(str(b) for b in parity_vector(m, k))}")
    print(f"  odd count S     {s}")
    print(f"  remainder r     {r}  (~{float(r):.6f})")
    print(f"  (m/2^k + r)*3^S = {rebuilt} = {direct} = iterate_{k}({m})")
    assert rebuilt == direct == closed_form_iterate(m, k)


def demo_remainder_growth(m):
    print(f"remainders r_k({m}) stay inside [0, 1):")
    for k, r in enumerate(r_sequence(m, 12)):
        bar = "#" * int(40 * r / 1)
        print(f"  k={k:<3} {float(r):.9f} {bar}")


def demo_split(m, k0, k):
    # the remainder after k0+k steps splits into a cheap-to-update pair
    ok = verify_split_identity(m, k, k0)
    print(f"split identity at m={m}, k0={k0}, k={k}: {'holds' if ok else 'FAILS'}")


def main():
    demo_identity(27, 11)
    print()
    demo_remainder_growth(27)
    print()
    demo_split(27, 7, 9)
    demo_split(703, 13, 21)


if __name__ == "__main__":
    main()
