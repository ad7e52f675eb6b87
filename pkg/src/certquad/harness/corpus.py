"""Seeded random corpus of smooth test functions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..function_model import FunctionBundle, sample_second_derivative
from ..kernel import Interval

MAX_F2_RANGE = 1e6


@dataclass(frozen=True)
class CorpusMember:
    index: int
    text: str
    a: float
    b: float

    @property
    def interval(self) -> Interval:
        return Interval(self.a, self.b)

    def bundle(self) -> FunctionBundle:
        return FunctionBundle.from_expr(self.text)


def _coef(rng: np.random.Generator, lo: float, hi: float) -> float:
    return round(float(rng.uniform(lo, hi)), 3)


def _polynomial(rng: np.random.Generator) -> str:
    degree = int(rng.integers(0, 7))
    terms = []
    for k in range(degree + 1):
        c = _coef(rng, -3.0, 3.0)
        if k == degree and c == 0.0:
            c = 1.0
        terms.append(f"({c!r})" if k == 0 else f"({c!r})*x^{k}")
    return " + ".join(terms)


def _mixture(rng: np.random.Generator) -> str:
    amp_s, amp_c, amp_e = (_coef(rng, -3.0, 3.0) for _ in range(3))
    w, v = _coef(rng, 0.3, 4.0), _coef(rng, 0.3, 4.0)
    phase = _coef(rng, -3.0, 3.0)
    rate = _coef(rng, -1.5, 1.5)
    return (
        f"({amp_s!r})*sin({w!r}*x + ({phase!r})) + ({amp_c!r})*cos({v!r}*x)"
        f" + ({amp_e!r})*exp(({rate!r})*x)"
    )


def generate_corpus(seed: int, count: int) -> list[CorpusMember]:
    """``count`` members alternating polynomials (degree <= 6) and trig/exp mixtures.

    Intervals have left ends in ``[-2, 1]`` and widths in ``[0.25, 2.5]``.
    Candidates whose ``f''`` range exceeds ``1e6`` are redrawn.
    """
    rng = np.random.default_rng(seed)
    members = []
    while len(members) < count:
        i = len(members)
        text = _polynomial(rng) if i % 2 == 0 else _mixture(rng)
        a = round(float(rng.uniform(-2.0, 1.0)), 3)
        b = round(a + float(rng.uniform(0.25, 2.5)), 3)
        member = CorpusMember(i, text, a, b)
        f2 = sample_second_derivative(member.bundle(), member.interval, 257)
        if float(np.ptp(f2)) > MAX_F2_RANGE:
            continue
        members.append(member)
    return members
