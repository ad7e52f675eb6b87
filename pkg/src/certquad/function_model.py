"""Function bundles (f and its derivatives) and the smoothness constants of f''."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import expr as ex
from .errors import DomainError, InvalidBoundsError
from .kernel import Interval
from .reference import reference_integral

# Named functions of the numerical comparison table, in row order.
BUILTINS: dict[str, str] = {
    "table1.row1": "cos(x) - x",
    "table1.row2": "exp(2*x)*cos(exp(x))",
    "table1.row3": "1/(x^4 + 4*x^2 + 3)",
    "table1.row4": "tan(x) + x",
    "table1.row5": "ln(x^2 + 1)",
}

DEFAULT_SAMPLES = 1025
DEFAULT_INFLATION = 0.01
DEFAULT_REF_TOL = 1e-11
SIGMA_SLACK = 1e-10


@dataclass(frozen=True)
class Source:
    kind: str  # "expression" or "builtin" or "native"
    label: str


def _on_grid(g: Callable, t):
    """Call ``g`` on an array, falling back to element-wise calls."""
    t = np.asarray(t, dtype=float)
    try:
        y = np.asarray(g(t), dtype=float)
        if y.shape == t.shape:
            return y
        if y.ndim == 0:
            return np.full(t.shape, float(y))
    except (TypeError, ValueError):
        pass
    return np.vectorize(lambda s: float(g(float(s))), otypes=[float])(t)


@dataclass(frozen=True)
class FunctionBundle:
    """Evaluators for ``f``, ``f'``, ``f''`` and optionally ``f'''``.

    Evaluators accept floats or numpy arrays.  Use :meth:`from_expr` or
    :func:`resolve_function` for parsed expressions; :meth:`from_callables`
    wraps hand-written derivatives and spot-checks them against finite
    differences when given a ``check_interval``.
    """

    f: Callable
    f1: Callable
    f2: Callable
    f3: Optional[Callable] = None
    source: Source = field(default_factory=lambda: Source("native", "<callable>"))
    expression: Optional[ex.Expr] = None

    @classmethod
    def from_expr(cls, expression: ex.Expr | str, label: str | None = None) -> "FunctionBundle":
        node = ex.parse(expression) if isinstance(expression, str) else expression
        kind = "builtin" if label in BUILTINS else "expression"

        def f(t):
            return ex.evaluate(node, t)

        def f1(t):
            return ex.eval_jet(node, t).v1

        def f2(t):
            return ex.eval_jet(node, t).v2

        def f3(t):
            return ex.eval_jet(node, t).v3

        return cls(f, f1, f2, f3, Source(kind, label or ex.to_text(node)), node)

    @classmethod
    def from_callables(
        cls,
        f: Callable,
        f1: Callable,
        f2: Callable,
        f3: Optional[Callable] = None,
        name: str = "<callable>",
        check_interval: Optional[Interval] = None,
    ) -> "FunctionBundle":
        bundle = cls(f, f1, f2, f3, Source("native", name))
        if check_interval is not None:
            bundle.check_derivatives(check_interval)
        return bundle

    def jet(self, t):
        """``(f, f', f'', f''')`` at ``t``; ``f'''`` is NaN when unavailable."""
        if self.expression is not None:
            return tuple(ex.eval_jet(self.expression, t))
        third = _on_grid(self.f3, t) if self.f3 is not None else np.full(np.shape(t), np.nan)
        return _on_grid(self.f, t), _on_grid(self.f1, t), _on_grid(self.f2, t), third

    def check_derivatives(self, iv: Interval, points: int = 16, rtol: float = 1e-4) -> None:
        """Compare ``f'`` and ``f''`` with central differences at interior points."""
        t = iv.a + iv.width * (np.arange(1, points + 1) / (points + 1))
        step = 1e-5 * iv.width
        pairs = [(self.f, self.f1, "f'"), (self.f1, self.f2, "f''")]
        if self.f3 is not None:
            pairs.append((self.f2, self.f3, "f'''"))
        for lower, upper, name in pairs:
            fd = (_on_grid(lower, t + step) - _on_grid(lower, t - step)) / (2 * step)
            given = _on_grid(upper, t)
            scale = np.maximum(1.0, np.abs(given))
            bad = np.abs(fd - given) > rtol * scale
            if np.any(bad):
                i = int(np.argmax(bad))
                raise DomainError(
                    f"{name} of {self.source.label} disagrees with finite differences "
                    f"at t={t[i]!r}: {given[i]!r} vs {fd[i]!r}"
                )


def resolve_function(text: str) -> FunctionBundle:
    """Bundle for a builtin catalog name or an expression string."""
    if text in BUILTINS:
        return FunctionBundle.from_expr(BUILTINS[text], label=text)
    return FunctionBundle.from_expr(text)


@dataclass(frozen=True)
class SecondDerivBounds:
    """Bounds ``gamma <= f'' <= Gamma`` on an interval, with provenance."""

    gamma: float
    Gamma: float
    provenance: str = "user_supplied"  # or "grid_estimated"
    n_samples: Optional[int] = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.gamma) and math.isfinite(self.Gamma)):
            raise InvalidBoundsError(f"non-finite bounds ({self.gamma}, {self.Gamma})")
        if self.gamma > self.Gamma:
            raise InvalidBoundsError(f"gamma={self.gamma!r} exceeds Gamma={self.Gamma!r}")

    @property
    def spread(self) -> float:
        return self.Gamma - self.gamma

    @property
    def center(self) -> float:
        return 0.5 * (self.Gamma + self.gamma)

    @property
    def rigorous(self) -> bool:
        return self.provenance == "user_supplied"


@dataclass(frozen=True)
class SmoothnessConstants:
    """Everything the error bounds are parameterised by.

    ``sigma`` is ``||f''||_2^2 - S^2 (b-a)`` and ``l2_f3`` is ``||f'''||_2``;
    either may be ``None`` when it was not computed.
    """

    S: float
    bounds: Optional[SecondDerivBounds] = None
    sigma: Optional[float] = None
    l2_f3: Optional[float] = None


def compute_S(bundle: FunctionBundle, iv: Interval) -> float:
    """Secant slope of ``f'``: ``(f'(b) - f'(a)) / (b - a)``."""
    return (float(bundle.f1(iv.b)) - float(bundle.f1(iv.a))) / iv.width


def sample_second_derivative(bundle: FunctionBundle, iv: Interval, n_samples: int) -> np.ndarray:
    grid = np.linspace(iv.a, iv.b, n_samples)
    return _on_grid(bundle.f2, grid)


def estimate_second_deriv_bounds(
    bundle: FunctionBundle,
    iv: Interval,
    n_samples: int = DEFAULT_SAMPLES,
    inflation: float = DEFAULT_INFLATION,
) -> SecondDerivBounds:
    """Sample ``f''`` on a uniform grid (endpoints included) and pad the range.

    The result is ``[min - pad, max + pad]`` with ``pad = inflation*(max-min)``.
    This is an estimate, not an enclosure; the provenance says so.
    """
    if n_samples < 33:
        raise ValueError(f"n_samples must be at least 33, got {n_samples}")
    if inflation < 0:
        raise ValueError(f"inflation must be nonnegative, got {inflation}")
    values = sample_second_derivative(bundle, iv, n_samples)
    lo, hi = float(np.min(values)), float(np.max(values))
    pad = inflation * (hi - lo)
    return SecondDerivBounds(lo - pad, hi + pad, "grid_estimated", n_samples)


def compute_sigma(bundle: FunctionBundle, iv: Interval, ref_tol: float = DEFAULT_REF_TOL) -> float:
    """``sigma(f'') = ||f''||_2^2 - S^2 (b-a)``, clamped at zero.

    Integrated in the centred form ``int (f'' - S)^2``, which is the same
    quantity because ``int f'' = S (b-a)``, but avoids cancellation.
    """
    S = compute_S(bundle, iv)
    res = reference_integral(
        lambda t: (_on_grid(bundle.f2, t) - S) ** 2, iv.a, iv.b, tol=ref_tol, rel_tol=ref_tol
    )
    value = res.value
    if value < -SIGMA_SLACK:
        raise ArithmeticError(f"sigma evaluated to {value!r}")
    return max(value, 0.0)


def compute_l2_f3(bundle: FunctionBundle, iv: Interval, ref_tol: float = DEFAULT_REF_TOL) -> float:
    """``||f'''||_2`` on the interval."""
    if bundle.f3 is None:
        raise DomainError(f"{bundle.source.label} has no third-derivative evaluator")
    res = reference_integral(
        lambda t: _on_grid(bundle.f3, t) ** 2, iv.a, iv.b, tol=ref_tol, rel_tol=ref_tol
    )
    return math.sqrt(max(res.value, 0.0))


def compute_constants(
    bundle: FunctionBundle,
    iv: Interval,
    bounds: Optional[SecondDerivBounds] = None,
    n_samples: int = DEFAULT_SAMPLES,
    inflation: float = DEFAULT_INFLATION,
    ref_tol: float = DEFAULT_REF_TOL,
) -> SmoothnessConstants:
    """Compute every available constant; ``bounds`` overrides grid estimation."""
    if bounds is None:
        bounds = estimate_second_deriv_bounds(bundle, iv, n_samples, inflation)
    sigma = compute_sigma(bundle, iv, ref_tol)
    l2 = compute_l2_f3(bundle, iv, ref_tol) if bundle.f3 is not None else None
    return SmoothnessConstants(compute_S(bundle, iv), bounds, sigma, l2)
