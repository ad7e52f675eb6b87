"""Validity sweep: every bound against the oracle over a seeded corpus."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .. import composite as cq
from ..function_model import compute_constants
from ..parallel import map_ordered
from ..point_estimates import Theorem, all_estimates
from ..reference import reference_integral
from .corpus import CorpusMember, generate_corpus

SLACK = 1e-9
# below this a bound is at rounding level and its ratio is noise
RATIO_FLOOR = 1e-9
X_POINTS = 11
PARTITION_SIZES = (1, 2, 5, 10, 20)
POINT_TAGS = tuple(t.value for t in Theorem)
COMPOSITE_TAGS = ("gruss_31", "midrange_32", "s_gamma_33", "gamma_s_33", "l2_third_34", "variance_35")


@dataclass
class SweepReport:
    seed: int
    count: int
    checks: int = 0
    violations: list[dict] = field(default_factory=list)
    ratios: dict[str, list[float]] = field(default_factory=dict)

    def tightness(self) -> dict[str, dict[str, float]]:
        out = {}
        for tag in POINT_TAGS + COMPOSITE_TAGS:
            r = np.asarray(self.ratios.get(tag, []), dtype=float)
            if r.size == 0:
                out[tag] = {"n": 0}
                continue
            q = np.quantile(r, [0.0, 0.5, 0.9, 0.99, 1.0])
            out[tag] = {
                "n": int(r.size),
                "min": float(q[0]),
                "median": float(q[1]),
                "p90": float(q[2]),
                "p99": float(q[3]),
                "max": float(q[4]),
            }
        return out

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "count": self.count,
            "checks": self.checks,
            "violations": self.violations,
            "tightness": self.tightness(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        return render_report_text(self.to_dict())


def render_report_text(report: dict) -> str:
    """Aligned plain-text view of a report dictionary (as from JSON)."""
    lines = [
        f"seed {report['seed']}  functions {report['count']}  checks {report['checks']}  "
        f"violations {len(report['violations'])}",
        "",
        f"{'theorem':<14}{'n':>7}{'min':>12}{'median':>12}{'p90':>12}{'p99':>12}{'max':>12}",
    ]
    for tag, s in report["tightness"].items():
        if s["n"] == 0:
            lines.append(f"{tag:<14}{0:>7}")
            continue
        lines.append(
            f"{tag:<14}{s['n']:>7}{s['min']:>12.3e}{s['median']:>12.3e}"
            f"{s['p90']:>12.3e}{s['p99']:>12.3e}{s['max']:>12.3e}"
        )
    for v in report["violations"]:
        lines.append(
            f"VIOLATION #{v['index']} {v['theorem']} at {v['where']}: "
            f"|err|={v['lhs']:.6e} > bound={v['bound']:.6e}  f={v['function']} on [{v['a']}, {v['b']}]"
        )
    return "\n".join(lines)


def _check_member(member: CorpusMember) -> tuple[int, list[dict], list[tuple[str, float]]]:
    bundle = member.bundle()
    iv = member.interval
    constants = compute_constants(bundle, iv)
    ref = reference_integral(bundle.f, iv.a, iv.b, tol=1e-12, rel_tol=1e-14).value
    mean = ref / iv.width
    checks = 0
    violations: list[dict] = []
    ratios: list[tuple[str, float]] = []

    def record(tag: str, where: str, lhs: float, bound: float) -> None:
        nonlocal checks
        checks += 1
        if lhs > bound + SLACK:
            violations.append(
                {
                    "index": member.index,
                    "function": member.text,
                    "a": member.a,
                    "b": member.b,
                    "theorem": tag,
                    "where": where,
                    "lhs": lhs,
                    "bound": bound,
                }
            )
        if bound > RATIO_FLOOR:
            ratios.append((tag, lhs / bound))

    for x in np.linspace(iv.a, iv.mid, X_POINTS):
        for est in all_estimates(bundle, iv, float(x), constants):
            record(est.theorem.value, f"x={float(x)!r}", abs(est.value - mean), est.bound)
    for n in PARTITION_SIZES:
        part = cq.Partition.uniform(iv, n)
        for rule in ("q1", "q2"):
            res = cq.integrate(bundle, part, rule, constants)
            for tag, bound in res.bounds:
                record(tag, f"n={n}", abs(res.value - ref), bound)
    return checks, violations, ratios


def sweep_theorems(seed: int = 42, count: int = 200, workers: Optional[int] = None) -> SweepReport:
    """Check every point and composite bound on ``count`` seeded functions.

    Each function is tried at 11 evaluation points in the left half-interval
    and on uniform partitions with n in {1, 2, 5, 10, 20}.  A violation is
    ``|error| > bound + 1e-9``; tightness ratios ``|error|/bound`` are
    collected per theorem for bounds above ``1e-9``.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    members = generate_corpus(seed, count)
    report = SweepReport(seed, count)
    for checks, violations, ratios in map_ordered(_check_member, members, workers):
        report.checks += checks
        report.violations.extend(violations)
        for tag, r in ratios:
            report.ratios.setdefault(tag, []).append(r)
    return report
