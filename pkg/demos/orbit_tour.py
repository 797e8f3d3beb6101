# A walking tour of the three map variants and their stopping times.

from collatz_lab import orbit, tau, t_min


def show_orbit(kind, m):
    rec = orbit(kind, m, trace=True)
    path = " -> ".join(str(v) for v in rec.values)
    print(f"  {kind:>3}  {path}")
    print(f"       tau={rec.tau}  peak={rec.max_value}")


def records_below(limit):
    """Starting values that push tau to a new high."""
    best = -1
    out = []
    for m in range(1, limit + 1):
        t = tau(m)
        if t > best:
            best = t
            out.append((m, t))
    return out


def main():
    print("orbit of 27 under each variant:")
    for kind in ("t", "col", "syr"):
        rec = orbit(kind, 27)
        print(f"  {kind:>3}: tau={rec.tau:>3}  peak={rec.max_value}  steps={rec.steps_taken}")

    print()
    print("the full halved-odd trajectory of 7:")
    show_orbit("t", 7)

    print()
    print("tau record holders up to 10000:")
    for m, t in records_below(10000):
        print(f"  m={m:<6} tau={t}")

    print()
    print("orbit minima dip fast: m, t_min within 100 steps")
    for m in (9, 27, 97, 871):
        res = t_min(m, budget=100)
        tag = "exact" if res.exact else "so far"
        print(f"  m={m:<4} min={res.value} ({tag})")


if __name__ == "__main__":
    main()
