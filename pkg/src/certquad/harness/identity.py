"""Numerical check of the kernel identity behind every bound."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from ..function_model import FunctionBundle, _on_grid
from ..kernel import Interval, identity_rhs, kernel_value
from ..reference import reference_integral


def kernel_weighted_mean(bundle: FunctionBundle, iv: Interval, x: float, tol: float = 1e-11) -> float:
    """``(1/(b-a)) int K(x,t) f''(t) dt`` by the oracle, split at the kernel's jumps."""
    res = reference_integral(
        lambda t: kernel_value(iv, x, t) * _on_grid(bundle.f2, t),
        iv.a,
        iv.b,
        tol=tol,
        points=(x, iv.reflect(x)),
    )
    return res.value / iv.width


def check_identity(
    bundle: FunctionBundle, iv: Interval, x_grid: Iterable[float], ref_tol: float = 1e-11
) -> float:
    """Largest ``|identity_rhs - kernel-weighted mean of f''|`` over ``x_grid``."""
    ref_mean = reference_integral(bundle.f, iv.a, iv.b, tol=ref_tol).value / iv.width
    worst = 0.0
    for x in x_grid:
        lhs = kernel_weighted_mean(bundle, iv, float(x), ref_tol)
        worst = max(worst, abs(identity_rhs(bundle, iv, float(x), ref_mean) - lhs))
    return worst


def default_x_grid(iv: Interval, points: int = 11) -> np.ndarray:
    return np.linspace(iv.a, iv.mid, points)
