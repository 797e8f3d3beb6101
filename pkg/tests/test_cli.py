"""Exit codes, output formats, and option handling of the collatz-lab CLI."""

import json
import subprocess
import sys

import pytest

from collatz_lab.cli import run
from collatz_lab.stopping import tau_average


def _run(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# orbit


def test_orbit_basic(capsys):
    code, out, err = _run(capsys, "orbit", "--m", "7")
    assert code == 0
    assert out == "m=7 map=t tau=11 max_value=26 steps=11 reached_one=true\n"


def test_orbit_trace(capsys):
    code, out, _ = _run(capsys, "orbit", "--m", "7", "--trace")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[1] == "trace: 7 11 17 26 13 20 10 5 8 4 2 1"


def test_orbit_budget_exhausted(capsys):
    code, out, _ = _run(capsys, "orbit", "--m", "27", "--max-steps", "5")
    assert code == 0
    assert out == "m=27 map=t tau=unresolved max_value=71 steps=5 reached_one=false\n"


def test_orbit_syracuse(capsys):
    code, out, _ = _run(capsys, "orbit", "--m", "7", "--map", "syr")
    assert code == 0
    assert out == "m=7 map=syr tau=5 max_value=17 steps=5 reached_one=true\n"


def test_orbit_usage_errors(capsys):
    code, _, err = _run(capsys, "orbit", "--m", "4", "--map", "syr")
    assert code == 1
    assert "usage error:" in err and "odd" in err
    code, _, err = _run(capsys, "orbit", "--m", "0")
    assert code == 1
    code, _, err = _run(capsys, "orbit", "--m", "7", "--map", "bogus")
    assert code == 1


# ---------------------------------------------------------------------------
# verify


def test_verify_closed_form(capsys):
    code, out, _ = _run(capsys, "verify", "closed-form", "--m-max", "50", "--k-max", "30")
    assert code == 0
    assert out == "closed-form: OK (1550 checks, m <= 50, k <= 30)\n"


def test_verify_split(capsys):
    code, out, _ = _run(capsys, "verify", "split", "--m-max", "30", "--k-max", "10")
    assert code == 0
    assert out == "split: OK (3630 checks, m <= 30, k, k0 <= 10)\n"


def test_verify_requires_subcommand(capsys):
    code, _, err = _run(capsys, "verify")
    assert code == 1


# ---------------------------------------------------------------------------
# census


def test_census(capsys):
    code, out, _ = _run(capsys, "census", "--n", "8")
    assert code == 0
    assert out == "256/256 vectors, uniform\n"


def test_census_interval(capsys):
    code, out, _ = _run(capsys, "census", "--n", "6", "--interval-start", "1000")
    assert code == 0
    assert out == "64/64 vectors, uniform\n"


def test_census_bad_n(capsys):
    code, _, err = _run(capsys, "census", "--n", "0")
    assert code == 1
    assert "usage error:" in err


# ---------------------------------------------------------------------------
# table


def test_table_build_to_cache_file(capsys, tmp_path):
    target = tmp_path / "t6.bin"
    code, out, _ = _run(capsys, "table", "build", "--n", "6", "--cache", str(target))
    assert code == 0
    assert "table n=6: 64 residues" in out
    assert target.stat().st_size == 12 + 64 * 21


def test_table_bench_smoke(capsys):
    code, out, _ = _run(capsys, "table", "bench", "--n", "4", "--count", "20000")
    assert code == 0
    assert "speedup vs scalar:" in out


# ---------------------------------------------------------------------------
# density / fit


def test_density_csv_output(capsys, tmp_path):
    out_file = tmp_path / "rep.csv"
    code, _, _ = _run(
        capsys, "density", "--family", "MAIN_T", "--epsilon", "0.2",
        "--n-max", "4095", "--output", str(out_file),
    )
    assert code == 0
    lines = out_file.read_text().strip().split("\n")
    assert lines[0] == "shell_n,lo,hi,members,total,fraction"
    assert len(lines) == 13  # shells 0..11


def test_density_threads_byte_identical(capsys, tmp_path):
    f1, f4 = tmp_path / "a.csv", tmp_path / "b.csv"
    for f, t in ((f1, "1"), (f4, "4")):
        code, _, _ = _run(
            capsys, "density", "--family", "MAIN_T", "--epsilon", "0.2",
            "--n-max", "8191", "--threads", t, "--output", str(f),
        )
        assert code == 0
    assert f1.read_bytes() == f4.read_bytes()


def test_density_json(capsys):
    code, out, _ = _run(
        capsys, "density", "--family", "PARITY_BAND", "--epsilon", "0.5",
        "--n-max", "255", "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["exact"] is True
    assert len(payload["shells"]) == 8
    assert payload["shells"][0]["total"] == 1


def test_density_cumulative(capsys):
    code, out, _ = _run(
        capsys, "density", "--family", "MAIN_T", "--epsilon", "50",
        "--n-max", "63", "--cumulative",
    )
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "N,members,fraction"
    assert lines[-1] == "63,63,1.000000000000"


def test_density_reform_lambda_flag(capsys):
    code, out, _ = _run(
        capsys, "density", "--family", "REFORM_LAMBDA", "--epsilon", "0.1",
        "--lambda", "1", "--n-max", "127",
    )
    assert code == 0


def test_density_usage_errors(capsys):
    code, _, err = _run(
        capsys, "density", "--family", "REFORM_LAMBDA", "--epsilon", "0.1", "--n-max", "127"
    )
    assert code == 1
    assert "lambda" in err
    code, _, err = _run(
        capsys, "density", "--family", "MAIN_T", "--epsilon", "0.1", "--n-max", "1"
    )
    assert code == 1
    assert "shell_base" in err
    code, _, err = _run(
        capsys, "density", "--family", "MAIN_T", "--epsilon", "0.1",
        "--n-max", "64", "--threads", "0",
    )
    assert code == 1
    assert "--threads" in err


def test_density_sample_note(capsys):
    code, _, err = _run(
        capsys, "density", "--family", "MAIN_T", "--epsilon", "0.2",
        "--n-max", "16383", "--sample", "32",
    )
    assert code == 0
    assert "sampled counts" in err


def test_fit_round_trip(capsys, tmp_path):
    rep = tmp_path / "rep.csv"
    code, _, _ = _run(
        capsys, "density", "--family", "MAIN_T", "--epsilon", "0.2",
        "--n-max", str(2**14 - 1), "--output", str(rep),
    )
    assert code == 0
    code, out, _ = _run(capsys, "fit", "--input", str(rep))
    assert code == 0
    payload = json.loads(out)
    assert set(payload) == {"C", "D", "residual"}


def test_fit_undefined_exit_2(capsys, tmp_path):
    rep = tmp_path / "flat.csv"
    rep.write_text(
        "shell_n,lo,hi,members,total,fraction\n"
        "0,1,2,1,1,1.000000000000\n"
        "1,2,4,2,2,1.000000000000\n"
        "2,4,8,4,4,1.000000000000\n"
    )
    code, _, err = _run(capsys, "fit", "--input", str(rep))
    assert code == 2
    assert "fit: FAIL" in err


def test_fit_input_validation(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("wrong,header\n1,2\n")
    code, _, err = _run(capsys, "fit", "--input", str(bad))
    assert code == 1
    assert "expected header" in err

    code, _, err = _run(capsys, "fit", "--input", str(tmp_path / "missing.csv"))
    assert code == 1
    assert "cannot read" in err

    empty = tmp_path / "empty.csv"
    empty.write_text("shell_n,lo,hi,members,total,fraction\n")
    code, _, err = _run(capsys, "fit", "--input", str(empty))
    assert code == 1
    assert "no shell rows" in err

    garbled = tmp_path / "garbled.csv"
    garbled.write_text("shell_n,lo,hi,members,total,fraction\n0,1,2,x,1,1.0\n")
    code, _, err = _run(capsys, "fit", "--input", str(garbled))
    assert code == 1
    assert "malformed" in err


# ---------------------------------------------------------------------------
# hoeffding


def test_hoeffding_pass_line(capsys):
    code, out, _ = _run(capsys, "hoeffding", "--a", "1", "--b", "1025", "--n", "10", "--epsilon", "0.5")
    assert code == 0
    assert out == "violations=2/1024 empirical=0.001953125000 bound=0.026951787996 PASS\n"


def test_hoeffding_usage_errors(capsys):
    code, _, err = _run(capsys, "hoeffding", "--a", "1", "--b", "1025", "--n", "20", "--epsilon", "0.5")
    assert code == 1
    assert "N must satisfy" in err
    code, _, err = _run(capsys, "hoeffding", "--a", "1", "--b", "1025", "--n", "10", "--epsilon", "0")
    assert code == 1


# ---------------------------------------------------------------------------
# tau avg / exceed / tmin


def test_tau_avg_csv_matches_library(capsys):
    code, out, _ = _run(capsys, "tau", "avg", "--x", "10")
    assert code == 0
    assert out == tau_average(10).to_csv()


def test_tau_avg_json(capsys):
    code, out, _ = _run(capsys, "tau", "avg", "--x", "100", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["sum_tau"] == tau_average(100).sum_tau
    assert payload["unresolved"] == 0
    assert payload["checkpoints"][0]["x"] == 1


def test_tau_avg_unresolved_note(capsys):
    code, _, err = _run(capsys, "tau", "avg", "--x", "30", "--budget", "10")
    assert code == 0
    assert "unresolved within budget" in err


def test_tau_avg_output_file(capsys, tmp_path):
    f = tmp_path / "tau.csv"
    code, _, _ = _run(capsys, "tau", "avg", "--x", "1000", "--output", str(f))
    assert code == 0
    assert f.read_text() == tau_average(1000).to_csv()


def test_tau_avg_validation(capsys):
    code, _, err = _run(capsys, "tau", "avg", "--x", "1")
    assert code == 1
    assert "x >= 2" in err


def test_tau_exceed_exact_small(capsys):
    code, out, _ = _run(capsys, "tau", "exceed", "--alpha", "1.0", "--n-max", "4")
    assert code == 0
    assert out == (
        "shell_n,lo,hi,members,total,fraction\n"
        "0,1,2,0,1,0.000000000000\n"
        "1,2,4,1,2,0.500000000000\n"
        "2,4,5,0,1,0.000000000000\n"
    )


def test_tau_exceed_cumulative(capsys):
    code, out, _ = _run(capsys, "tau", "exceed", "--alpha", "1.0", "--n-max", "4", "--cumulative")
    assert code == 0
    assert out.startswith("N,members,fraction\n1,0,0.000000000000\n")


def test_tau_exceed_validation(capsys):
    code, _, err = _run(capsys, "tau", "exceed", "--alpha", "-1", "--n-max", "64")
    assert code == 1
    assert "alpha" in err


def test_tmin_all_members(capsys):
    code, out, _ = _run(capsys, "tmin", "--theta", "1.0", "--n-max", "63")
    assert code == 0
    for line in out.strip().split("\n")[1:]:
        assert line.endswith("1.000000000000")


def test_tmin_validation(capsys):
    code, _, err = _run(capsys, "tmin", "--theta", "0", "--n-max", "64")
    assert code == 1
    assert "theta" in err


# ---------------------------------------------------------------------------
# top-level parsing


def test_unknown_subcommand(capsys):
    code, _, err = _run(capsys, "frobnicate")
    assert code == 1
    assert "usage error:" in err


def test_no_arguments(capsys):
    code, _, err = _run(capsys)
    assert code == 1


def test_console_script_installed():
    proc = subprocess.run(
        [sys.executable, "-m", "collatz_lab.cli", "orbit", "--m", "7"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("m=7 ")
