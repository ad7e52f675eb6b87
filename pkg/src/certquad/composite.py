"""Composite perturbed quarter-point rules, the trapezoidal baseline, and remainder bounds.

On a partition ``a = x_0 < ... < x_n = b`` with steps ``h_i``:

* ``q1`` adds ``[f'(x_{i+1}) - f'(x_i)] h_i^2 / 96`` to each quarter-point pair,
* ``q2`` adds ``(Gamma + gamma) h_i^3 / 192`` instead.

Per-subinterval terms are computed as one array (optionally in parallel
chunks) and combined by :func:`tree_sum`, a fixed pairwise reduction, so the
result does not depend on the thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError, EvaluationError
from .function_model import (
    FunctionBundle,
    SecondDerivBounds,
    SmoothnessConstants,
    _on_grid,
    compute_constants,
    estimate_second_deriv_bounds,
)
from .kernel import Interval
from .parallel import map_ordered, thread_count

_PARALLEL_MIN = 4096
_SQRT5 = math.sqrt(5.0)


@dataclass(frozen=True)
class Partition:
    """Strictly increasing nodes ``x_0 < x_1 < ... < x_n``."""

    points: tuple[float, ...]

    def __post_init__(self) -> None:
        pts = tuple(float(p) for p in self.points)
        if len(pts) < 2:
            raise DomainError("a partition needs at least two nodes")
        if any(not math.isfinite(p) for p in pts):
            raise DomainError("partition nodes must be finite")
        if any(q <= p for p, q in zip(pts, pts[1:])):
            raise DomainError("partition nodes must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, iv: Interval, n: int) -> "Partition":
        if n < 1:
            raise DomainError(f"n must be at least 1, got {n}")
        pts = iv.a + (iv.b - iv.a) * (np.arange(n + 1) / n)
        pts[-1] = iv.b
        return cls(tuple(pts))

    @property
    def n(self) -> int:
        return len(self.points) - 1

    @property
    def nodes(self) -> np.ndarray:
        return np.asarray(self.points)

    @property
    def h(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def interval(self) -> Interval:
        return Interval(self.points[0], self.points[-1])

    @property
    def is_uniform(self) -> bool:
        h = self.h
        return bool(np.all(np.abs(h - h.mean()) <= 1e-12 * h.mean()))

    def concat(self, other: "Partition") -> "Partition":
        if other.points[0] != self.points[-1]:
            raise DomainError("partitions do not share an endpoint")
        return Partition(self.points + other.points[1:])


@dataclass(frozen=True)
class QuadratureResult:
    """Approximation of the integral (not the mean) with its remainder bounds."""

    value: float
    rule: str  # "q1", "q2" or "trapezoid"
    n: int
    bounds: tuple[tuple[str, float], ...] = ()
    converged: bool = True
    provenance: str = "user_supplied"

    @property
    def min_bound(self) -> float:
        if not self.bounds:
            return math.inf
        return min(v for _, v in self.bounds)

    @property
    def best(self) -> Optional[tuple[str, float]]:
        if not self.bounds:
            return None
        return min(self.bounds, key=lambda kv: kv[1])


def tree_sum(values) -> float:
    """Pairwise sum in a fixed order: adjacent pairs, level by level."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        return 0.0
    while v.size > 1:
        if v.size % 2:
            v = np.append(v, 0.0)
        v = v[0::2] + v[1::2]
    return float(v[0])


def _evaluate(g: Callable, t: np.ndarray, partition: Partition, workers: Optional[int]) -> np.ndarray:
    n = thread_count(workers)
    try:
        if n > 1 and t.size >= _PARALLEL_MIN:
            chunks = np.array_split(t, n)
            return np.concatenate(map_ordered(lambda c: _on_grid(g, c), chunks, n))
        return _on_grid(g, t)
    except EvaluationError as exc:
        nodes = partition.nodes
        i = int(np.clip(np.searchsorted(nodes, exc.x, side="right") - 1, 0, partition.n - 1))
        raise EvaluationError(
            exc.node, exc.x, f"{exc.reason} (subinterval [{nodes[i]!r}, {nodes[i + 1]!r}])"
        ) from exc


def _quarter_terms(bundle: FunctionBundle, partition: Partition, workers: Optional[int]) -> np.ndarray:
    x = partition.nodes
    left, right = x[:-1], x[1:]
    t = np.concatenate([(3.0 * left + right) / 4.0, (left + 3.0 * right) / 4.0])
    y = _evaluate(bundle.f, t, partition, workers)
    n = partition.n
    return 0.5 * (y[:n] + y[n:]) * partition.h


def quarter_point_sum(bundle: FunctionBundle, partition: Partition, workers: Optional[int] = None) -> float:
    """Unperturbed companion rule ``sum [f(q_i) + f(q_i')] h_i / 2``."""
    return tree_sum(_quarter_terms(bundle, partition, workers))


def q1(bundle: FunctionBundle, partition: Partition, workers: Optional[int] = None) -> float:
    """Quarter-point rule perturbed by ``[f'(x_{i+1}) - f'(x_i)] h_i^2 / 96``.

    The derivative sum is kept term by term: it telescopes only for uniform
    steps.
    """
    h = partition.h
    d = _evaluate(bundle.f1, partition.nodes, partition, workers)
    terms = _quarter_terms(bundle, partition, workers) + np.diff(d) * h * h / 96.0
    return tree_sum(terms)


def q2(
    bundle: FunctionBundle, partition: Partition, bounds: SecondDerivBounds, workers: Optional[int] = None
) -> float:
    """Quarter-point rule perturbed by ``(Gamma + gamma) h_i^3 / 192``."""
    h = partition.h
    terms = _quarter_terms(bundle, partition, workers) + (bounds.Gamma + bounds.gamma) / 192.0 * h**3
    return tree_sum(terms)


def trapezoid(bundle: FunctionBundle, partition: Partition, workers: Optional[int] = None) -> float:
    y = _evaluate(bundle.f, partition.nodes, partition, workers)
    return tree_sum(0.5 * (y[:-1] + y[1:]) * partition.h)


def _sum_power(partition: Partition, p: float) -> float:
    return tree_sum(partition.h**p)


def remainder_q1_gruss(partition: Partition, bounds: SecondDerivBounds) -> float:
    return bounds.spread / 128.0 * _sum_power(partition, 3)


def remainder_q2(partition: Partition, bounds: SecondDerivBounds) -> float:
    return bounds.spread / 192.0 * _sum_power(partition, 3)


def remainder_q1_s_gamma(partition: Partition, S: float, gamma: float) -> float:
    if S < gamma - 1e-12 * max(1.0, abs(S), abs(gamma)):
        raise DomainError(f"S={S!r} below gamma={gamma!r}")
    return max(S - gamma, 0.0) / 48.0 * _sum_power(partition, 3)


def remainder_q1_gamma_s(partition: Partition, Gamma: float, S: float) -> float:
    if S > Gamma + 1e-12 * max(1.0, abs(S), abs(Gamma)):
        raise DomainError(f"S={S!r} above Gamma={Gamma!r}")
    return max(Gamma - S, 0.0) / 48.0 * _sum_power(partition, 3)


def remainder_q1_l2third(partition: Partition, l2_f3: float) -> float:
    if l2_f3 < 0:
        raise DomainError(f"||f'''||_2 must be nonnegative, got {l2_f3!r}")
    return l2_f3 / (48.0 * math.pi * _SQRT5) * _sum_power(partition, 3.5)


def remainder_q1_sigma(partition: Partition, sigma: float) -> float:
    if sigma < 0:
        raise DomainError(f"sigma must be nonnegative, got {sigma!r}")
    return math.sqrt(sigma) / (48.0 * _SQRT5) * _sum_power(partition, 2.5)


def remainder_trapezoid(partition: Partition, bounds: SecondDerivBounds) -> float:
    """Classical ``max(|gamma|, |Gamma|) sum h_i^3 / 12``."""
    return max(abs(bounds.gamma), abs(bounds.Gamma)) / 12.0 * _sum_power(partition, 3)


def local_second_deriv_bounds(
    bundle: FunctionBundle, partition: Partition, n_samples: int = 65, inflation: float = 0.01
) -> list[SecondDerivBounds]:
    """Per-subinterval grid estimates of ``f''`` bounds (sharpened mode)."""
    x = partition.points
    return [
        estimate_second_deriv_bounds(bundle, Interval(lo, hi), n_samples, inflation)
        for lo, hi in zip(x[:-1], x[1:])
    ]


def remainder_q1_gruss_local(partition: Partition, local: Sequence[SecondDerivBounds]) -> float:
    """``sum (Gamma_i - gamma_i) h_i^3 / 128`` with per-subinterval bounds."""
    if len(local) != partition.n:
        raise DomainError(f"need {partition.n} local bounds, got {len(local)}")
    spreads = np.array([b.spread for b in local])
    return tree_sum(spreads * partition.h**3) / 128.0


def _local_slopes(bundle: FunctionBundle, partition: Partition) -> np.ndarray:
    d = _on_grid(bundle.f1, partition.nodes)
    return np.diff(d) / partition.h


def applicable_bounds(
    rule: str, bundle: FunctionBundle, partition: Partition, constants: SmoothnessConstants
) -> list[tuple[str, float]]:
    """Remainder bounds that certify ``rule`` given the available constants.

    For non-uniform partitions the S-based bounds use subinterval slopes
    ``S_i`` (``sum (S_i - gamma) h_i^3 / 48``); the global-``S`` form is only
    valid when the steps are equal, where the two coincide.
    """
    b = constants.bounds
    out: list[tuple[str, float]] = []
    if rule == "q1":
        if b is not None:
            out.append(("gruss_31", remainder_q1_gruss(partition, b)))
            S = constants.S
            if partition.is_uniform:
                try:
                    pair = [
                        ("s_gamma_33", remainder_q1_s_gamma(partition, S, b.gamma)),
                        ("gamma_s_33", remainder_q1_gamma_s(partition, b.Gamma, S)),
                    ]
                except DomainError:
                    pair = []
                out.extend(pair)
            else:
                slopes = _local_slopes(bundle, partition)
                h3 = partition.h**3
                if np.all(slopes >= b.gamma) and np.all(slopes <= b.Gamma):
                    out.append(("s_gamma_33", tree_sum((slopes - b.gamma) * h3) / 48.0))
                    out.append(("gamma_s_33", tree_sum((b.Gamma - slopes) * h3) / 48.0))
        if constants.l2_f3 is not None:
            out.append(("l2_third_34", remainder_q1_l2third(partition, constants.l2_f3)))
        if constants.sigma is not None:
            out.append(("variance_35", remainder_q1_sigma(partition, constants.sigma)))
    elif rule == "q2":
        if b is not None:
            out.append(("midrange_32", remainder_q2(partition, b)))
    elif rule == "trapezoid":
        if b is not None:
            out.append(("trapezoid_classical", remainder_trapezoid(partition, b)))
    else:
        raise DomainError(f"unknown rule {rule!r}")
    return out


def integrate(
    bundle: FunctionBundle,
    partition: Partition,
    rule: str = "q1",
    constants: Optional[SmoothnessConstants] = None,
    workers: Optional[int] = None,
) -> QuadratureResult:
    """Apply ``rule`` and attach every applicable remainder bound."""
    if constants is None:
        constants = compute_constants(bundle, partition.interval)
    if rule == "q1":
        value = q1(bundle, partition, workers)
    elif rule == "q2":
        if constants.bounds is None:
            raise DomainError("q2 needs bounds on f''")
        value = q2(bundle, partition, constants.bounds, workers)
    elif rule == "trapezoid":
        value = trapezoid(bundle, partition, workers)
    else:
        raise DomainError(f"unknown rule {rule!r}")
    provenance = constants.bounds.provenance if constants.bounds is not None else "user_supplied"
    bounds = tuple(applicable_bounds(rule, bundle, partition, constants))
    return QuadratureResult(value, rule, partition.n, bounds, True, provenance)


def integrate_to_tolerance(
    bundle: FunctionBundle,
    iv: Interval,
    tol: float,
    max_n: int = 1 << 20,
    constants: Optional[SmoothnessConstants] = None,
    workers: Optional[int] = None,
    rule: str = "q1",
) -> QuadratureResult:
    """Run ``rule`` on uniform partitions n = 1, 2, 4, ... until a bound is <= ``tol``.

    Returns the last result with ``converged=False`` when ``n`` would exceed
    ``max_n`` first.
    """
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    if constants is None:
        constants = compute_constants(bundle, iv)
    n = 1
    result = integrate(bundle, Partition.uniform(iv, n), rule, constants, workers)
    while result.min_bound > tol:
        n *= 2
        if n > max_n:
            return QuadratureResult(
                result.value, result.rule, result.n, result.bounds, False, result.provenance
            )
        result = integrate(bundle, Partition.uniform(iv, n), rule, constants, workers)
    return result
