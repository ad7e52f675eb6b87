"""Adaptive Gauss-Kronrod (7, 15) integration used as the independent oracle.

Nothing here knows about kernels or perturbed rules: the oracle must stay
independent of the code paths it is used to check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import IntegrationError

# Kronrod abscissae on [0, 1) for the 15-point rule; odd indices are the
# 7-point Gauss nodes.
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])  # 15 nodes, ascending
_WEIGHTS_K = np.concatenate([_WK[:-1], _WK[::-1]])
_WEIGHTS_G = np.zeros(15)
_WEIGHTS_G[[1, 3, 5]] = _WG[:3]
_WEIGHTS_G[7] = _WG[3]
_WEIGHTS_G[[9, 11, 13]] = _WG[2::-1]

MAX_PANELS = 1_000_000


@dataclass(frozen=True)
class ReferenceIntegral:
    value: float
    error_estimate: float
    evaluations: int
    panels: int


def _vectorized(f: Callable) -> Callable:
    def g(t: np.ndarray) -> np.ndarray:
        y = np.asarray(f(t), dtype=float)
        if y.shape != t.shape:
            y = np.broadcast_to(y, t.shape) if y.ndim == 0 else y.reshape(t.shape)
        return y

    return g


def gauss_kronrod_panels(f: Callable, lo: np.ndarray, hi: np.ndarray):
    """Kronrod estimates and ``|K15 - G7|`` for each panel ``[lo_i, hi_i]``."""
    half = 0.5 * (hi - lo)
    center = 0.5 * (hi + lo)
    t = center[:, None] + half[:, None] * _NODES[None, :]
    y = _vectorized(f)(t)
    kron = half * (y @ _WEIGHTS_K)
    gauss = half * (y @ _WEIGHTS_G)
    return kron, np.abs(kron - gauss)


def reference_integral(
    f: Callable,
    a: float,
    b: float,
    tol: float = 1e-12,
    rel_tol: float = 0.0,
    points: Sequence[float] = (),
    initial_panels: int = 1,
    max_panels: int = MAX_PANELS,
) -> ReferenceIntegral:
    """Integrate a vectorised ``f`` over ``[a, b]``.

    Panels whose error exceeds their width-proportional share of the target
    ``max(tol, rel_tol * sum|panel values|)`` are bisected until the summed
    estimate ``sum |K15 - G7|`` meets the target.
    ``points`` are extra initial breakpoints (use them at kinks and jumps).

    Raises
    ------
    IntegrationError
        If more than ``max_panels`` panels would be needed.
    """
    if tol < 1e-13:
        raise ValueError(f"tol={tol!r} below the supported minimum")
    a, b = float(a), float(b)
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    if a == b:
        return ReferenceIntegral(0.0, 0.0, 0, 0)
    width = b - a
    edges = np.linspace(a, b, max(1, int(initial_panels)) + 1)
    inner = [p for p in points if a < p < b]
    if inner:
        edges = np.unique(np.concatenate([edges, np.asarray(inner, dtype=float)]))
    lo, hi = edges[:-1], edges[1:]

    done_values: list[np.ndarray] = []
    done_abs = 0.0
    done_err = 0.0
    evaluations = 0
    panels = len(lo)
    while True:
        kron, err = gauss_kronrod_panels(f, lo, hi)
        evaluations += 15 * len(lo)
        total_err = done_err + float(np.sum(err))
        target = max(tol, rel_tol * (done_abs + float(np.sum(np.abs(kron)))))
        if total_err <= target:
            done_values.append(kron)
            done_err = total_err
            break
        share = target * (hi - lo) / width
        ok = err <= share
        # panels already at rounding width cannot be refined further
        tiny = (hi - lo) <= 64 * np.finfo(float).eps * np.maximum(np.abs(lo), np.abs(hi))
        ok |= tiny
        done_values.append(kron[ok])
        done_abs += float(np.sum(np.abs(kron[ok])))
        done_err += float(np.sum(err[ok]))
        split = ~ok
        if not np.any(split):
            raise IntegrationError(
                f"reference integral on [{a}, {b}] limited by rounding: "
                f"error estimate {total_err:.3e} > target {target:.1e}"
            )
        mid = 0.5 * (lo[split] + hi[split])
        lo = np.concatenate([lo[split], mid])
        hi = np.concatenate([mid, hi[split]])
        panels += int(np.count_nonzero(split))
        if panels > max_panels:
            raise IntegrationError(
                f"reference integral on [{a}, {b}] exceeded {max_panels} panels "
                f"(error estimate {total_err:.3e} > tol {tol:.1e})"
            )
    value = math.fsum(np.concatenate(done_values).tolist())
    return ReferenceIntegral(sign * value, done_err, evaluations, panels)
