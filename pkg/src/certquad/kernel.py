"""Peano-type kernel of the perturbed companion rule and its closed-form moments.

For ``x`` in the left half of ``[a, b]`` the kernel is the piecewise quadratic

    K(x, t) = (t - a)^2 / 2          for a <= t <= x
              (t - (a+b)/2)^2 / 2    for x < t <= a+b-x
              (t - b)^2 / 2          for a+b-x < t <= b

and the weighted integral ``(1/(b-a)) * int K(x,t) f''(t) dt`` is exactly the
error of the perturbed two-point estimator.  Every error bound in the package
is a product of a smoothness constant of ``f`` and one of the moments below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError

_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class Interval:
    """A real interval ``[a, b]`` with ``a < b``."""

    a: float
    b: float

    def __post_init__(self) -> None:
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise DomainError(f"interval endpoints must be finite, got [{a}, {b}]")
        if not a < b:
            raise DomainError(f"interval requires a < b, got [{a}, {b}]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def width(self) -> float:
        return self.b - self.a

    @property
    def mid(self) -> float:
        return 0.5 * (self.a + self.b)

    @property
    def quarter(self) -> float:
        """The quarter point ``(3a+b)/4``."""
        return 0.25 * (3.0 * self.a + self.b)

    def reflect(self, x):
        """Mirror ``x`` about the midpoint: ``a + b - x``."""
        return self.a + self.b - x

    def check_point(self, x: float) -> float:
        """Validate an estimator parameter ``a <= x <= (a+b)/2``.

        Values within a few ulps outside the range (e.g. a translated
        midpoint) are snapped onto the nearest end.
        """
        x = float(x)
        slack = 8.0 * _EPS * max(abs(self.a), abs(self.b), self.width)
        if self.a <= x <= self.mid:
            return x
        if self.a - slack <= x < self.a:
            return self.a
        if self.mid < x <= self.mid + slack:
            return self.mid
        raise DomainError(
            f"x={x!r} outside the left half [{self.a!r}, {self.mid!r}] of the interval"
        )

    def contains(self, t) -> bool:
        t = np.asarray(t, dtype=float)
        return bool(np.all((t >= self.a) & (t <= self.b)))

    def shifted(self, c: float) -> "Interval":
        return Interval(self.a + c, self.b + c)


def kernel_value(iv: Interval, x: float, t):
    """Evaluate ``K(x, t)``; vectorised over ``t``.

    Breakpoints use closed comparisons ``t <= x`` then ``t <= a+b-x``, so at
    ``t = x`` and ``t = a+b-x`` the left piece's closure is taken.  At ``x = a``
    the last piece is empty, so ``K(a, b) = (b-a)^2/8`` rather than 0.
    """
    x = iv.check_point(x)
    t_arr = np.asarray(t, dtype=float)
    if not iv.contains(t_arr):
        raise DomainError(f"t outside [{iv.a!r}, {iv.b!r}]")
    right = iv.reflect(x)
    out = np.where(
        t_arr <= x,
        0.5 * (t_arr - iv.a) ** 2,
        np.where(t_arr <= right, 0.5 * (t_arr - iv.mid) ** 2, 0.5 * (t_arr - iv.b) ** 2),
    )
    if out.ndim == 0:
        return float(out)
    return out


def kernel_first_moment(iv: Interval, x: float) -> float:
    """Mean of the kernel, ``(1/(b-a)) int K(x,t) dt = (x-q)^2/2 + (b-a)^2/96``."""
    x = iv.check_point(x)
    d = x - iv.quarter
    return 0.5 * d * d + iv.width**2 / 96.0


def kernel_sup(iv: Interval, x: float) -> float:
    """``max_t K(x,t) = ((b-a)/4 + |x-q|)^2 / 2``."""
    x = iv.check_point(x)
    s = 0.25 * iv.width + abs(x - iv.quarter)
    return 0.5 * s * s


def kernel_centered_sup(iv: Interval, x: float) -> float:
    """``max_t |K(x,t) - m(x)| = (b-a)^2/48 + (b-a)/4 * |x-q|``."""
    x = iv.check_point(x)
    h = iv.width
    return h * h / 48.0 + 0.25 * h * abs(x - iv.quarter)


def kernel_centered_l2sq(iv: Interval, x: float) -> float:
    """``int (K(x,t) - m(x))^2 dt``.

    Evaluated from ``int K^2 = (a+b-2x)^5/320 + (x-a)^5/10`` minus
    ``(b-a) m(x)^2``; the subtraction can go a few ulps negative, which is
    clamped to zero.
    """
    x = iv.check_point(x)
    m = kernel_first_moment(iv, x)
    value = (iv.a + iv.b - 2.0 * x) ** 5 / 320.0 + (x - iv.a) ** 5 / 10.0 - iv.width * m * m
    scale = iv.width**5
    if value < -1e-12 * scale:
        raise ArithmeticError(f"negative kernel variance {value!r} at x={x!r}")
    return max(value, 0.0)


def perturbed_bracket(
    f: Callable, f1: Callable, iv: Interval, x: float
) -> float:
    """``[f(x)+f(a+b-x)]/2 - (x-q) [f'(x) - f'(a+b-x)]/2``.

    The part of every estimator that does not depend on the perturbation
    coefficient.
    """
    x = iv.check_point(x)
    xr = iv.reflect(x)
    return 0.5 * (float(f(x)) + float(f(xr))) - (x - iv.quarter) * 0.5 * (
        float(f1(x)) - float(f1(xr))
    )


def identity_rhs(bundle, iv: Interval, x: float, ref_mean: float) -> float:
    """Right-hand side of the kernel identity.

    ``ref_mean - [f(x)+f(a+b-x)]/2 + (x-q)[f'(x)-f'(a+b-x)]/2``, which must
    equal ``(1/(b-a)) int K(x,t) f''(t) dt``.
    """
    return ref_mean - perturbed_bracket(bundle.f, bundle.f1, iv, x)
