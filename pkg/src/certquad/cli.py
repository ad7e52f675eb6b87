"""Command-line front end.

Every command builds a JSON-ready record first; the text and CSV views are
rendered from that record alone, so rendering a record re-read from JSON
produces identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from typing import Callable, Optional, Sequence

from . import composite as cq
from . import point_estimates as pe
from . import probability as pr
from .errors import CertquadError, DensityError, DomainError, IntegrationError, ParseError
from .function_model import SecondDerivBounds, compute_constants, resolve_function
from .harness import reproduce_table1, sweep_theorems
from .harness.sweep import render_report_text
from .kernel import Interval

EXIT_OK, EXIT_USAGE, EXIT_UNCONVERGED, EXIT_DENSITY = 0, 2, 3, 4

_PI_TOKENS = {"pi": math.pi, "pi/2": math.pi / 2, "pi/4": math.pi / 4}

# remainder and point bounds that depend on (gamma, Gamma)
_USES_BOUNDS = {
    "gruss_21", "midrange_22", "s_gamma_23", "gamma_s_23",
    "gruss_31", "midrange_32", "s_gamma_33", "gamma_s_33", "trapezoid_classical",
}


def parse_endpoint(text: str) -> float:
    """Decimal literal or one of ``pi``, ``pi/2``, ``pi/4`` with optional sign."""
    t = text.strip().replace(" ", "")
    sign = 1.0
    if t[:1] in "+-" and t[1:] in _PI_TOKENS:
        sign, t = (-1.0 if t[0] == "-" else 1.0), t[1:]
    if t in _PI_TOKENS:
        return sign * _PI_TOKENS[t]
    try:
        value = float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid endpoint {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"endpoint must be finite, got {text!r}")
    return value


def _user_bounds(args) -> Optional[SecondDerivBounds]:
    if args.gamma is None and args.Gamma is None:
        return None
    if args.gamma is None or args.Gamma is None:
        raise DomainError("--gamma and --Gamma must be given together")
    return SecondDerivBounds(args.gamma, args.Gamma, "user_supplied")


def _constants_summary(constants) -> dict:
    b = constants.bounds
    return {
        "S": constants.S,
        "gamma": None if b is None else b.gamma,
        "Gamma": None if b is None else b.Gamma,
        "bounds_provenance": None if b is None else b.provenance,
        "sigma": constants.sigma,
        "l2_f3": constants.l2_f3,
    }


def _provenance(tag: str, constants) -> str:
    if tag in _USES_BOUNDS and constants.bounds is not None:
        return constants.bounds.provenance
    return "reference_integral"


# --------------------------------------------------------------------------
# commands


def cmd_integrate(args) -> tuple[dict, int]:
    bundle = resolve_function(args.f)
    iv = Interval(args.a, args.b)
    constants = compute_constants(bundle, iv, _user_bounds(args))
    rule = {"trap": "trapezoid"}.get(args.rule, args.rule)
    if args.n is not None:
        res = cq.integrate(bundle, cq.Partition.uniform(iv, args.n), rule, constants, args.threads)
    else:
        res = cq.integrate_to_tolerance(bundle, iv, args.tol, args.max_n, constants, args.threads, rule)
    record = {
        "command": "integrate",
        "function": args.f,
        "a": iv.a,
        "b": iv.b,
        "rule": args.rule,
        "n": res.n,
        "tol": args.tol,
        "value": res.value,
        "converged": res.converged,
        "constants": _constants_summary(constants),
        "bounds": [
            {"theorem": tag, "bound": v, "provenance": _provenance(tag, constants)} for tag, v in res.bounds
        ],
        "best": None if res.best is None else res.best[0],
    }
    return record, EXIT_OK if res.converged else EXIT_UNCONVERGED


def cmd_point(args) -> tuple[dict, int]:
    bundle = resolve_function(args.f)
    iv = Interval(args.a, args.b)
    x = iv.quarter if args.x is None else iv.check_point(args.x)
    constants = compute_constants(bundle, iv, _user_bounds(args))
    estimates = pe.all_estimates(bundle, iv, x, constants)
    best = pe.best_estimate(bundle, iv, x, constants)
    record = {
        "command": "point",
        "function": args.f,
        "a": iv.a,
        "b": iv.b,
        "x": x,
        "constants": _constants_summary(constants),
        "estimates": [
            {
                "theorem": e.theorem.value,
                "estimate": e.value,
                "bound": e.bound,
                "provenance": _provenance(e.theorem.value, constants),
                "best": e.theorem is best.theorem,
            }
            for e in estimates
        ],
        "best": best.theorem.value,
    }
    return record, EXIT_OK


def cmd_table1(args) -> tuple[dict, int]:
    rows = reproduce_table1()
    record = {
        "command": "table1",
        "rows": [r.to_dict() for r in rows],
        "all_passed": all(r.passed for r in rows),
    }
    return record, EXIT_OK


def cmd_verify(args) -> tuple[dict, int]:
    report = sweep_theorems(args.seed, args.count, args.threads)
    record = {"command": "verify", **report.to_dict()}
    return record, EXIT_OK


def cmd_expect(args) -> tuple[dict, int]:
    pdf = resolve_function(args.pdf)
    iv = Interval(args.a, args.b)
    model = pr.DensityModel(pdf, iv)
    x = iv.quarter if args.x is None else iv.check_point(args.x)
    constants = pr.cdf_constants(model, _user_bounds(args))
    reference = pr.expectation_reference(model)
    tags = list(pe.Theorem) if args.theorem == "all" else [pr.parse_tag(args.theorem)]
    brackets = []
    for tag in tags:
        try:
            br = pr.expectation_bracket(model, x, tag, constants)
        except DomainError as exc:
            if args.theorem != "all":
                raise
            brackets.append({"theorem": tag.value, "skipped": str(exc)})
            continue
        brackets.append(
            {
                "theorem": br.theorem.value,
                "center": br.center,
                "halfwidth": br.halfwidth,
                "lower": br.lower,
                "upper": br.upper,
                "contains_reference": br.contains(reference, 1e-9),
            }
        )
    record = {
        "command": "expect",
        "pdf": args.pdf,
        "a": iv.a,
        "b": iv.b,
        "x": x,
        "total_mass": model.total_mass,
        "reference_expectation": reference,
        "constants": _constants_summary(constants),
        "brackets": brackets,
    }
    return record, EXIT_OK


# --------------------------------------------------------------------------
# rendering


def _cell(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _table(headers: Sequence[str], rows: Sequence[Sequence]) -> list[str]:
    cells = [[_cell(v) for v in r] for r in rows]
    widths = [max([len(h)] + [len(r[i]) for r in cells]) for i, h in enumerate(headers)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    out = [fmt.format(*headers).rstrip(), "  ".join("-" * w for w in widths)]
    out.extend(fmt.format(*r).rstrip() for r in cells)
    return out


def _pairs(pairs: Sequence[tuple[str, object]]) -> list[str]:
    w = max(len(k) for k, _ in pairs)
    return [f"{k:<{w}}  {_cell(v)}" for k, v in pairs]


def _constant_pairs(c: dict) -> list[tuple[str, object]]:
    return [(k, c[k]) for k in ("S", "gamma", "Gamma", "bounds_provenance", "sigma", "l2_f3")]


_TABLE1_COLS = ("name", "n", "interval", "exact_integral", "t_n", "t_error", "q1", "q2", "q1_error", "q2_error")


def _tabular(record: dict) -> tuple[list[str], list[list]]:
    """The record's main table: headers and rows (also the CSV body)."""
    cmd = record["command"]
    if cmd == "integrate":
        head = ["rule", "n", "value", "converged", "theorem", "bound", "provenance"]
        lead = [record["rule"], record["n"], record["value"], record["converged"]]
        rows = [lead + [b["theorem"], b["bound"], b["provenance"]] for b in record["bounds"]]
        return head, rows or [lead + [None, None, None]]
    if cmd == "point":
        head = ["theorem", "estimate", "bound", "provenance", "best"]
        return head, [[e[h] for h in head] for e in record["estimates"]]
    if cmd == "table1":
        head = list(_TABLE1_COLS) + ["result"]
        return head, [[r[h] for h in _TABLE1_COLS] + ["PASS" if r["passed"] else "FAIL"] for r in record["rows"]]
    if cmd == "verify":
        head = ["theorem", "n", "min", "median", "p90", "p99", "max"]
        rows = [[tag] + [s.get(h) for h in head[1:]] for tag, s in record["tightness"].items()]
        return head, rows
    if cmd == "expect":
        head = ["theorem", "center", "halfwidth", "lower", "upper", "contains_reference"]
        return head, [[b.get(h) for h in head] for b in record["brackets"]]
    raise ValueError(f"unknown command {cmd!r}")


def render_text(record: dict) -> str:
    cmd = record["command"]
    if cmd == "verify":
        return render_report_text(record)
    lines: list[str] = []
    if cmd == "integrate":
        lines += _pairs(
            [("function", record["function"]), ("interval", f"[{record['a']!r}, {record['b']!r}]"),
             ("rule", record["rule"]), ("n", record["n"]), ("tol", record["tol"]),
             ("value", record["value"]), ("converged", record["converged"]), ("best", record["best"])]
            + _constant_pairs(record["constants"])
        )
    elif cmd == "point":
        lines += _pairs(
            [("function", record["function"]), ("interval", f"[{record['a']!r}, {record['b']!r}]"),
             ("x", record["x"]), ("best", record["best"])]
            + _constant_pairs(record["constants"])
        )
    elif cmd == "expect":
        lines += _pairs(
            [("pdf", record["pdf"]), ("interval", f"[{record['a']!r}, {record['b']!r}]"), ("x", record["x"]),
             ("total_mass", record["total_mass"]), ("reference_expectation", record["reference_expectation"])]
            + _constant_pairs(record["constants"])
        )
    head, rows = _tabular(record)
    if cmd != "table1":
        lines.append("")
    lines += _table(head, rows)
    if cmd == "table1":
        lines.append("")
        for r in record["rows"]:
            failed = [k for k, ok in r["checks"].items() if not ok]
            lines.append(f"{r['name']}: {'PASS' if r['passed'] else 'FAIL'}"
                         + (f"  (mismatched: {', '.join(failed)})" if failed else ""))
    elif cmd == "expect":
        for b in record["brackets"]:
            if "skipped" in b:
                lines.append(f"{b['theorem']}: skipped ({b['skipped']})")
    return "\n".join(lines)


def render_csv(record: dict) -> str:
    head, rows = _tabular(record)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(head)
    w.writerows([[_cell(v) for v in r] for r in rows])
    return buf.getvalue()


def render(record: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(record, indent=2)
    if fmt == "csv":
        return render_csv(record)
    return render_text(record)


# --------------------------------------------------------------------------
# argument parsing


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "text", "csv"), default="text")
    p.add_argument("--threads", type=int, default=None, help="worker threads (0 = one per CPU)")
    p.add_argument("--timing", action="store_true", help="add elapsed seconds to the record")


def _add_interval(p: argparse.ArgumentParser) -> None:
    p.add_argument("--a", type=parse_endpoint, required=True, help="left end (decimal, pi, pi/2, pi/4)")
    p.add_argument("--b", type=parse_endpoint, required=True, help="right end")


def _add_bounds(p: argparse.ArgumentParser, what: str) -> None:
    p.add_argument("--gamma", type=float, default=None, help=f"lower bound on {what}")
    p.add_argument("--Gamma", type=float, default=None, help=f"upper bound on {what}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="certquad", description="Quadrature with certified error bounds.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("integrate", help="composite rule with remainder bounds")
    p.add_argument("--f", required=True, help="expression in x, or a builtin name")
    _add_interval(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--n", type=int, help="number of uniform subintervals")
    g.add_argument("--tol", type=float, help="double n until a bound is at most tol")
    p.add_argument("--max-n", type=int, default=1 << 20)
    p.add_argument("--rule", choices=("q1", "q2", "trap"), default="q1")
    _add_bounds(p, "f''")
    _add_common(p)
    p.set_defaults(handler=cmd_integrate)

    p = sub.add_parser("point", help="single-interval estimates at x")
    p.add_argument("--f", required=True)
    _add_interval(p)
    p.add_argument("--x", type=parse_endpoint, default=None, help="evaluation point (default quarter point)")
    _add_bounds(p, "f''")
    _add_common(p)
    p.set_defaults(handler=cmd_point)

    p = sub.add_parser("table1", help="reproduce the five-row comparison table")
    _add_common(p)
    p.set_defaults(handler=cmd_table1)

    p = sub.add_parser("verify", help="bound-validity sweep over a seeded corpus")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--count", type=int, default=200)
    _add_common(p)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("expect", help="bracket the expectation of a density on [a, b]")
    p.add_argument("--pdf", required=True, help="density expression in x")
    _add_interval(p)
    p.add_argument("--x", type=parse_endpoint, default=None)
    p.add_argument("--theorem", default="all", help="tag such as gruss or gruss_21, or 'all'")
    _add_bounds(p, "the density derivative")
    _add_common(p)
    p.set_defaults(handler=cmd_expect)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler: Callable = args.handler
    start = time.perf_counter()
    try:
        record, code = handler(args)
    except DensityError as exc:
        print(f"certquad: invalid density: {exc}", file=sys.stderr)
        return EXIT_DENSITY
    except ParseError as exc:
        print(f"certquad: syntax error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IntegrationError as exc:
        print(f"certquad: {exc}", file=sys.stderr)
        return EXIT_UNCONVERGED
    except (CertquadError, ValueError, ArithmeticError) as exc:
        print(f"certquad: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.timing:
        record["timing_s"] = time.perf_counter() - start
    out = render(record, args.format)
    sys.stdout.write(out if out.endswith("\n") else out + "\n")
    if code == EXIT_UNCONVERGED:
        print("certquad: tolerance not reached", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
