from __future__ import annotations

import csv
import io
import json
import math
import subprocess
import sys

import pytest

from certquad.cli import main, parse_endpoint, render_csv, render_text


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv: str) -> tuple[int, dict]:
    code, out, _ = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def test_parse_endpoint():
    assert parse_endpoint("pi") == math.pi
    assert parse_endpoint("pi/2") == math.pi / 2
    assert parse_endpoint("-pi/4") == -math.pi / 4
    assert parse_endpoint("1.25") == 1.25
    with pytest.raises(Exception):
        parse_endpoint("two")


def test_integrate_row1(capsys):
    code, rec = run_json(capsys, "integrate", "--f", "table1.row1", "--a", "0", "--b", "pi/2", "--n", "20")
    assert code == 0
    assert rec["value"] == pytest.approx(-0.2337005, abs=1e-7)
    assert rec["n"] == 20 and rec["converged"] is True
    tags = {b["theorem"] for b in rec["bounds"]}
    assert {"gruss_31", "l2_third_34", "variance_35"} <= tags
    prov = {b["theorem"]: b["provenance"] for b in rec["bounds"]}
    assert prov["gruss_31"] == "grid_estimated" and prov["variance_35"] == "reference_integral"


def test_integrate_quadratic_has_zero_bounds(capsys):
    code, rec = run_json(capsys, "integrate", "--f", "x^2", "--a", "0", "--b", "1", "--n", "4")
    assert code == 0
    assert rec["value"] == pytest.approx(1 / 3, abs=1e-15)
    assert all(b["bound"] == 0.0 for b in rec["bounds"])


def test_integrate_tolerance_mode(capsys):
    code, rec = run_json(capsys, "integrate", "--f", "x^4", "--a", "0", "--b", "1", "--tol", "1e-6")
    assert code == 0 and rec["converged"]
    assert min(b["bound"] for b in rec["bounds"]) <= 1e-6


def test_integrate_rules(capsys):
    for rule in ("q1", "q2", "trap"):
        code, rec = run_json(capsys, "integrate", "--f", "x^3", "--a", "0", "--b", "1", "--n", "8", "--rule", rule)
        assert code == 0 and rec["rule"] == rule
        if rule != "trap":
            assert rec["value"] == pytest.approx(0.25, abs=1e-14)


def test_user_bounds_override(capsys):
    code, rec = run_json(
        capsys, "integrate", "--f", "x^4", "--a", "0", "--b", "1", "--n", "2", "--gamma", "0", "--Gamma", "12"
    )
    assert code == 0
    assert rec["constants"]["bounds_provenance"] == "user_supplied"
    assert rec["constants"]["gamma"] == 0.0 and rec["constants"]["Gamma"] == 12.0


def test_syntax_error_exit_code(capsys):
    code, out, err = run(capsys, "integrate", "--f", "x^", "--a", "0", "--b", "1", "--n", "4")
    assert code == 2 and out == "" and "syntax" in err


def test_unreachable_tolerance_exit_code(capsys):
    code, out, err = run(
        capsys, "integrate", "--f", "exp(x)", "--a", "0", "--b", "1", "--tol", "1e-30", "--max-n", "64", "--format", "json"
    )
    assert code == 3
    assert json.loads(out)["converged"] is False


def test_point_default_is_quarter_point(capsys):
    code, rec = run_json(capsys, "point", "--f", "x^4", "--a", "0", "--b", "1")
    assert code == 0 and rec["x"] == 0.25
    assert rec["best"] == "variance_25"
    best = [e for e in rec["estimates"] if e["best"]]
    assert len(best) == 1 and best[0]["bound"] == pytest.approx(1 / 30, rel=1e-9)


def test_point_outside_left_half(capsys):
    code, _, err = run(capsys, "point", "--f", "x", "--a", "0", "--b", "1", "--x", "0.9")
    assert code == 2 and err


def test_expect_examples(capsys):
    code, rec = run_json(capsys, "expect", "--pdf", "2*x", "--a", "0", "--b", "1", "--theorem", "gruss")
    assert code == 0
    [br] = rec["brackets"]
    assert br["center"] == pytest.approx(2 / 3, abs=1e-12) and br["halfwidth"] == pytest.approx(0.0, abs=1e-12)
    code, rec = run_json(capsys, "expect", "--pdf", "1", "--a", "0", "--b", "1")
    assert code == 0 and len(rec["brackets"]) == 6
    assert all(b["contains_reference"] for b in rec["brackets"])


@pytest.mark.parametrize("pdf", ["3*x", "x - 0.5"])
def test_invalid_density_exit_code(capsys, pdf):
    code, out, err = run(capsys, "expect", "--pdf", pdf, "--a", "0", "--b", "1")
    assert code == 4 and out == "" and "density" in err


def test_table1_command(capsys):
    code, rec = run_json(capsys, "table1")
    assert code == 0
    assert len(rec["rows"]) == 5
    assert rec["all_passed"] == all(r["passed"] for r in rec["rows"])
    code, text, _ = run(capsys, "table1")
    assert text.count("table1.row") >= 5


def test_verify_small(capsys):
    code, rec = run_json(capsys, "verify", "--seed", "3", "--count", "6")
    assert code == 0 and rec["violations"] == [] and rec["seed"] == 3


@pytest.mark.parametrize(
    "argv",
    [
        ("integrate", "--f", "table1.row3", "--a", "0", "--b", "1", "--n", "10"),
        ("point", "--f", "sin(x)", "--a", "0", "--b", "pi"),
        ("expect", "--pdf", "3*x^2", "--a", "0", "--b", "1"),
        ("verify", "--seed", "1", "--count", "3"),
    ],
    ids=["integrate", "point", "expect", "verify"],
)
def test_text_and_csv_are_functions_of_json(capsys, argv):
    _, rec = run_json(capsys, *argv)
    _, text, _ = run(capsys, *argv, "--format", "text")
    assert render_text(rec).rstrip("\n") == text.rstrip("\n")
    _, csv_out, _ = run(capsys, *argv, "--format", "csv")
    assert render_csv(rec).rstrip("\r\n") == csv_out.rstrip("\r\n")
    rows = list(csv.reader(io.StringIO(csv_out)))
    assert len(rows) >= 2 and all(len(r) == len(rows[0]) for r in rows)


def test_json_output_is_deterministic(capsys):
    argv = ("integrate", "--f", "exp(x)", "--a", "0", "--b", "1", "--n", "32")
    _, a, _ = run(capsys, *argv, "--format", "json")
    _, b, _ = run(capsys, *argv, "--format", "json", "--threads", "4")
    assert a == b


def test_timing_flag(capsys):
    _, rec = run_json(capsys, "integrate", "--f", "x", "--a", "0", "--b", "1", "--n", "1", "--timing")
    assert rec["timing_s"] >= 0.0


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "certquad", "point", "--f", "x^2", "--a", "0", "--b", "1", "--format", "json"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["command"] == "point"
