"""Command line surface: collatz-lab <subcommand>.

Exit codes are scriptable: 0 success, 1 usage error (bad flags or violated
preconditions, message names the violation), 2 a verification, census,
bound, or fit failure. Scan subcommands accept --threads; output files are
byte-identical for any thread count.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import Optional

from . import closed_form, density, maps, step_tables, stopping


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; the contract here reserves
    # 2 for verification failures, so parse errors are rethrown and mapped to 1
    def error(self, message):
        raise _UsageError(message)


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _threads(args) -> Optional[int]:
    t = getattr(args, "threads", None)
    if t is not None and t < 1:
        raise _UsageError(f"--threads must be >= 1, got {t}")
    return t


def _cmd_orbit(args) -> int:
    rec = maps.orbit(args.map_kind, args.m, max_steps=args.max_steps, trace=args.trace)
    tau_txt = str(rec.tau) if rec.tau is not None else "unresolved"
    print(
        f"m={rec.start} map={rec.map_kind} tau={tau_txt} "
        f"max_value={rec.max_value} steps={rec.steps_taken} "
        f"reached_one={'true' if rec.reached_one else 'false'}"
    )
    if args.trace:
        print("trace: " + " ".join(str(v) for v in rec.values))
    return 0


def _cmd_verify_closed_form(args) -> int:
    checks, failures = closed_form.closed_form_sweep(args.m_max, args.k_max)
    if failures:
        print(f"closed-form: FAIL ({failures} of {checks} checks)")
        return 2
    print(f"closed-form: OK ({checks} checks, m <= {args.m_max}, k <= {args.k_max})")
    return 0


def _cmd_verify_split(args) -> int:
    checks, failures = closed_form.split_identity_sweep(args.m_max, args.k_max)
    if failures:
        print(f"split: FAIL ({failures} of {checks} checks)")
        return 2
    print(f"split: OK ({checks} checks, m <= {args.m_max}, k, k0 <= {args.k_max})")
    return 0


def _cmd_census(args) -> int:
    if args.interval_start is None:
        res = step_tables.parity_census(args.n)
    else:
        res = step_tables.census_on_interval(args.interval_start, args.n)
    status = "uniform" if res.uniform else "NONUNIFORM"
    print(f"{res.distinct}/{res.total} vectors, {status}")
    return 0 if res.uniform else 2


def _cmd_table_build(args) -> int:
    table = step_tables.build_table(args.n)
    path = Path(args.cache) if args.cache else step_tables.cache_path(args.n)
    path.parent.mkdir(parents=True, exist_ok=True)
    step_tables.save_table(table, path)
    print(f"table n={args.n}: {table.size} residues, saved to {path}")
    return 0


def _cmd_table_bench(args) -> int:
    table = step_tables.get_table(args.n)
    rep = step_tables.bench_throughput(table, args.count)
    print(f"bench n={rep.n} total_steps={rep.total_steps}")
    print(f"single-step scalar:     {rep.scalar_steps_per_sec:16,.0f} steps/s")
    print(f"single-step vectorized: {rep.vector_steps_per_sec:16,.0f} steps/s")
    print(f"batch via table:        {rep.batch_steps_per_sec:16,.0f} steps/s")
    print(f"speedup vs scalar:      {rep.speedup_vs_scalar:.2f}x")
    print(f"speedup vs vectorized:  {rep.speedup_vs_vector:.2f}x")
    return 0


def _report_json(report: density.DensityReport) -> str:
    payload = {
        "label": report.label,
        "base": report.base,
        "n_max": report.n_max,
        "exact": report.exact,
        "unresolved": report.unresolved,
        "shells": [
            {
                "n": s.n,
                "lo": s.lo,
                "hi": s.hi,
                "members": s.members,
                "total": s.total,
                "fraction": s.fraction,
            }
            for s in report.shells
        ],
        "cumulative": [
            {"N": c.upto, "members": c.members, "fraction": c.fraction}
            for c in report.cumulative
        ],
    }
    return json.dumps(payload, sort_keys=True) + "\n"


def _emit_report(report: density.DensityReport, args) -> None:
    if args.format == "json":
        text = _report_json(report)
    elif getattr(args, "cumulative", False):
        text = report.cumulative_csv()
    else:
        text = report.shell_csv()
    _emit(text, args.output)


def _cmd_density(args) -> int:
    spec = density.PredicateSpec(
        family=args.family,
        epsilon=args.epsilon,
        lambda_=args.lambda_,
        alpha=args.alpha,
    )
    report = density.measure_density(
        spec,
        args.n_max,
        shell_base=args.base,
        threads=_threads(args),
        sample_per_shell=args.sample,
    )
    if not report.exact:
        print("note: sampled counts, fractions are estimates", file=sys.stderr)
    _emit_report(report, args)
    return 0


def _read_shell_csv(path: str) -> density.DensityReport:
    expected = ["shell_n", "lo", "hi", "members", "total", "fraction"]
    shells = []
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != expected:
                raise _UsageError(
                    f"{path}: expected header {','.join(expected)}, got "
                    f"{','.join(header) if header else 'empty file'}"
                )
            for row in reader:
                if not row:
                    continue
                n, lo, hi, members, total = (int(x) for x in row[:5])
                shells.append(
                    density.ShellRow(n=n, lo=lo, hi=hi, members=members, total=total)
                )
    except OSError as e:
        raise _UsageError(f"cannot read {path}: {e.strerror or e}") from e
    except (ValueError, StopIteration) as e:
        raise _UsageError(f"{path}: malformed shell CSV ({e})") from e
    if not shells:
        raise _UsageError(f"{path}: no shell rows")
    cumulative = []
    cm = ct = 0
    for s in shells:
        cm += s.members
        ct += s.total
        cumulative.append(density.CumulativeRow(upto=s.hi - 1, members=cm, total=ct))
    return density.DensityReport(
        label=f"file:{path}",
        base=2.0,
        n_max=shells[-1].hi - 1,
        shells=shells,
        cumulative=cumulative,
    )


def _cmd_fit(args) -> int:
    report = _read_shell_csv(args.input)
    try:
        fit = density.fit_star_density(report)
    except density.FitUndefinedError as e:
        print(f"fit: FAIL ({e})", file=sys.stderr)
        return 2
    print(fit.to_json())
    return 0


def _cmd_hoeffding(args) -> int:
    chk = density.hoeffding_check(args.a, args.b, args.n, args.epsilon)
    verdict = "PASS" if chk.passed else "FAIL"
    print(
        f"violations={chk.violations}/{chk.total} "
        f"empirical={chk.empirical:.12f} bound={chk.bound:.12f} {verdict}"
    )
    return 0 if chk.passed else 2


def _cmd_tau_avg(args) -> int:
    summary = stopping.tau_average(
        args.x,
        budget=args.budget,
        use_table=not args.no_table,
        threads=_threads(args),
    )
    if args.format == "json":
        payload = {
            "x": summary.x,
            "budget": summary.budget,
            "sum_tau": summary.sum_tau,
            "normalized": summary.normalized,
            "unresolved": summary.unresolved,
            "checkpoints": [
                {
                    "x": r.x,
                    "sum_tau": r.sum_tau,
                    "normalized": r.normalized,
                    "unresolved": r.unresolved,
                }
                for r in summary.checkpoints
            ],
        }
        _emit(json.dumps(payload, sort_keys=True) + "\n", args.output)
    else:
        _emit(summary.to_csv(), args.output)
    if summary.unresolved:
        print(f"note: {summary.unresolved} orbits unresolved within budget", file=sys.stderr)
    if summary.floor_violations:
        print(
            f"tau floor check: FAIL ({summary.floor_violations} resolved m "
            f"with tau(m) < floor(log2 m))",
            file=sys.stderr,
        )
        return 2
    return 0


def _cmd_tau_exceed(args) -> int:
    report = stopping.tau_exceedance_density(
        args.alpha,
        args.n_max,
        budget=args.budget,
        threads=_threads(args),
    )
    _emit_report(report, args)
    return 0


def _cmd_tmin(args) -> int:
    report = stopping.tmin_threshold_density(
        args.theta,
        args.n_max,
        budget=args.budget,
        threads=_threads(args),
    )
    _emit_report(report, args)
    return 0


def _add_output_opts(p, formats=("csv", "json")) -> None:
    p.add_argument("--output", help="write the report to this file instead of stdout")
    p.add_argument("--format", choices=formats, default="csv")


def _build_parser() -> _Parser:
    p = _Parser(prog="collatz-lab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    orbit = sub.add_parser("orbit", help="iterate one starting value")
    orbit.add_argument("--m", type=int, required=True)
    orbit.add_argument("--map", dest="map_kind", choices=["t", "col", "syr"], default="t")
    orbit.add_argument("--max-steps", type=int, default=maps.DEFAULT_BUDGET)
    orbit.add_argument("--trace", action="store_true", help="print every orbit value")
    orbit.set_defaults(handler=_cmd_orbit)

    verify = sub.add_parser("verify", help="exact identity sweeps")
    vsub = verify.add_subparsers(dest="what", required=True, parser_class=_Parser)
    vcf = vsub.add_parser("closed-form", help="closed-form iterate vs direct orbit")
    vcf.add_argument("--m-max", type=int, required=True)
    vcf.add_argument("--k-max", type=int, required=True)
    vcf.set_defaults(handler=_cmd_verify_closed_form)
    vsp = vsub.add_parser("split", help="remainder split identity")
    vsp.add_argument("--m-max", type=int, required=True)
    vsp.add_argument("--k-max", type=int, required=True)
    vsp.set_defaults(handler=_cmd_verify_split)

    census = sub.add_parser("census", help="parity-vector bijection over a 2^n window")
    census.add_argument("--n", type=int, required=True)
    census.add_argument("--interval-start", type=int, default=None)
    census.set_defaults(handler=_cmd_census)

    table = sub.add_parser("table", help="residue step tables")
    tsub = table.add_subparsers(dest="what", required=True, parser_class=_Parser)
    tb = tsub.add_parser("build", help="build and cache a table")
    tb.add_argument("--n", type=int, required=True)
    tb.add_argument("--cache", help="cache file path (default: the cache directory)")
    tb.set_defaults(handler=_cmd_table_build)
    tbench = tsub.add_parser("bench", help="steps/second, single-step vs batch")
    tbench.add_argument("--n", type=int, required=True)
    tbench.add_argument("--count", type=int, required=True, help="total steps to time")
    tbench.set_defaults(handler=_cmd_table_bench)

    dens = sub.add_parser("density", help="shell-by-shell membership counts")
    dens.add_argument("--family", choices=density.FAMILIES, required=True)
    dens.add_argument("--epsilon", type=float, required=True)
    dens.add_argument("--lambda", dest="lambda_", type=float, default=None)
    dens.add_argument("--alpha", type=float, default=None)
    dens.add_argument("--n-max", type=int, required=True)
    dens.add_argument("--base", type=float, default=2.0, help="shell base (default 2)")
    dens.add_argument("--threads", type=int, default=None)
    dens.add_argument("--sample", type=int, default=None, help="samples per shell (non-exact)")
    dens.add_argument("--cumulative", action="store_true", help="emit the cumulative CSV")
    _add_output_opts(dens)
    dens.set_defaults(handler=_cmd_density)

    fit = sub.add_parser("fit", help="fit complement ~ C/N^D from a shell CSV")
    fit.add_argument("--input", required=True, metavar="REPORT.csv")
    fit.set_defaults(handler=_cmd_fit)

    hoeff = sub.add_parser("hoeffding", help="exact parity concentration vs bound")
    hoeff.add_argument("--a", type=int, required=True)
    hoeff.add_argument("--b", type=int, required=True)
    hoeff.add_argument("--n", dest="n", type=int, required=True)
    hoeff.add_argument("--epsilon", type=float, required=True)
    hoeff.set_defaults(handler=_cmd_hoeffding)

    tau = sub.add_parser("tau", help="stopping-time statistics")
    tausub = tau.add_subparsers(dest="what", required=True, parser_class=_Parser)
    tavg = tausub.add_parser("avg", help="sum and normalized average of tau up to x")
    tavg.add_argument("--x", type=int, required=True)
    tavg.add_argument("--budget", type=int, default=stopping.DEFAULT_BUDGET)
    tavg.add_argument("--no-table", action="store_true", help="single-step only")
    tavg.add_argument("--threads", type=int, default=None)
    _add_output_opts(tavg)
    tavg.set_defaults(handler=_cmd_tau_avg)
    texc = tausub.add_parser("exceed", help="density of tau(m) > alpha*log2(m)")
    texc.add_argument("--alpha", type=float, required=True)
    texc.add_argument("--n-max", type=int, required=True)
    texc.add_argument("--budget", type=int, default=stopping.DEFAULT_BUDGET)
    texc.add_argument("--threads", type=int, default=None)
    texc.add_argument("--cumulative", action="store_true", help="emit the cumulative CSV")
    _add_output_opts(texc)
    texc.set_defaults(handler=_cmd_tau_exceed)

    tmin = sub.add_parser("tmin", help="density of orbits dipping below m^theta")
    tmin.add_argument("--theta", type=float, required=True)
    tmin.add_argument("--n-max", type=int, required=True)
    tmin.add_argument("--budget", type=int, default=stopping.DEFAULT_BUDGET)
    tmin.add_argument("--threads", type=int, default=None)
    tmin.add_argument("--cumulative", action="store_true", help="emit the cumulative CSV")
    _add_output_opts(tmin)
    tmin.set_defaults(handler=_cmd_tmin)

    return p


def run(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except _UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
