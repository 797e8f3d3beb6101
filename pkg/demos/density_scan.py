# Scan how often the k-indexed iterate lands inside its predicted band, shell
# by shell, then fit the complement's apparent power-law decay.

from collatz_lab import (
    MAIN_T,
    FitUndefinedError,
    PredicateSpec,
    fit_star_density,
    measure_density,
    reform_profile,
)


def scan(epsilon, n_max):
    spec = PredicateSpec(family=MAIN_T, epsilon=epsilon)
    report = measure_density(spec, n_max)
    print(f"{report.label} over [1, {n_max}]:")
    print("  shell          lo..hi        members/total   fraction")
    for s in report.shells:
        print(f"  {s.n:>5}  {s.lo:>8}..{s.hi - 1:<8}  {s.members:>7}/{s.total:<8} {s.fraction:8.5f}")
    last = report.cumulative[-1]
    print(f"  cumulative to {last.upto}: {last.members} members ({last.fraction:.5f})")
    return report


def fit(report):
    try:
        f = fit_star_density(report)
    except FitUndefinedError as exc:
        print(f"  fit undefined: {exc}")
        return
    print(f"  complement ~ C / N^D with C={f.C:.3f}, D={f.D:.4f} "
          f"(residual {f.residual:.3f}, {f.points_used} shells)")


def profile(m):
    print(f"where does the iterate indexed by lambda sit for m={m}?")
    print("  lambda    k      iterate      within m^(lambda +- 0.1)")
    for row in reform_profile(m, [0.0, 0.25, 0.5, 0.75, 1.0], 0.1):
        print(f"  {row.lambda_:>6.2f}  {row.k:>3}  {row.iterate:>11}  {row.within}")


def main():
    report = scan(0.2, 2**18 - 1)
    fit(report)
    print()
    profile(2**20)
    print()
    print("same scan, looser band (members saturate quickly):")
    report = scan(0.5, 2**14 - 1)
    fit(report)


if __name__ == "__main__":
    main()
