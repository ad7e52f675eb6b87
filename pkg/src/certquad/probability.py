"""Certified brackets for the expectation of a random variable on ``[a, b]``.

Integration by parts gives ``E(X) = b - int_a^b F``, so the mean of the CDF
``F`` over ``[a, b]`` is ``(b - E)/(b - a)``.  Applying the single-interval
estimators to ``F`` (whose derivatives are the density ``f``, then ``f'`` and
``f''``) brackets that mean, and rescaling by ``b - a`` brackets ``E``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from . import point_estimates as pe
from .errors import DensityError, DomainError
from .function_model import (
    DEFAULT_INFLATION,
    DEFAULT_REF_TOL,
    DEFAULT_SAMPLES,
    FunctionBundle,
    SecondDerivBounds,
    SmoothnessConstants,
    _on_grid,
    compute_S,
    compute_l2_f3,
    compute_sigma,
    estimate_second_deriv_bounds,
)
from .kernel import Interval
from .reference import gauss_kronrod_panels, reference_integral

CDF_KNOTS = 1025
NORMALISATION_HARD = 1e-6
NORMALISATION_WARN = 1e-8
NEGATIVITY_SLACK = 1e-12

TAG_ALIASES = {
    "gruss": pe.Theorem.GRUSS,
    "midrange": pe.Theorem.MIDRANGE,
    "s_gamma": pe.Theorem.S_GAMMA,
    "gamma_s": pe.Theorem.GAMMA_S,
    "l2_third": pe.Theorem.L2_THIRD,
    "variance": pe.Theorem.VARIANCE,
}


def parse_tag(tag: "str | pe.Theorem") -> pe.Theorem:
    if isinstance(tag, pe.Theorem):
        return tag
    if tag in TAG_ALIASES:
        return TAG_ALIASES[tag]
    try:
        return pe.Theorem(tag)
    except ValueError:
        known = sorted(set(TAG_ALIASES) | {t.value for t in pe.Theorem})
        raise DomainError(f"unknown theorem tag {tag!r}; expected one of {known}") from None


def _monotone_slopes(x: np.ndarray, y: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Fritsch-Carlson limiting of Hermite slopes so each cubic piece is monotone."""
    d = np.maximum(d.astype(float).copy(), 0.0)
    delta = np.diff(y) / np.diff(x)
    for k, s in enumerate(delta):
        if s <= 0.0:
            d[k] = d[k + 1] = 0.0
            continue
        alpha, beta = d[k] / s, d[k + 1] / s
        r = alpha * alpha + beta * beta
        if r > 9.0:
            tau = 3.0 / math.sqrt(r)
            d[k] = tau * alpha * s
            d[k + 1] = tau * beta * s
    return d


class DensityModel:
    """A density on ``[a, b]`` with an eagerly built CDF interpolant.

    The CDF is cubic Hermite on 1025 knots: knot values are reference
    integrals of ``f``, knot slopes are ``f`` itself (limited for
    monotonicity).  Construction validates the density and raises
    :class:`DensityError` when it is negative or fails to integrate to one
    within ``1e-6``.
    """

    def __init__(self, pdf: FunctionBundle, iv: Interval, knots: int = CDF_KNOTS):
        self.pdf = pdf
        self.iv = iv
        grid = np.linspace(iv.a, iv.b, knots)
        check = np.linspace(iv.a, iv.b, 2 * knots - 1)
        values = _on_grid(pdf.f, check)
        if np.any(values < -NEGATIVITY_SLACK):
            i = int(np.argmin(values))
            raise DensityError(f"density is negative ({float(values[i])!r}) at t={float(check[i])!r}")

        lo, hi = grid[:-1], grid[1:]
        pieces, err = gauss_kronrod_panels(pdf.f, lo, hi)
        for i in np.flatnonzero(err > 1e-13):
            pieces[i] = reference_integral(pdf.f, lo[i], hi[i], tol=1e-13).value
        pieces = np.maximum(pieces, 0.0)
        F = np.concatenate([[0.0], np.cumsum(pieces)])
        total = float(F[-1])
        if abs(total - 1.0) > NORMALISATION_HARD:
            raise DensityError(f"density integrates to {total!r}, not 1")
        if abs(total - 1.0) > NORMALISATION_WARN:
            warnings.warn(f"density integrates to {total!r}; deviation exceeds 1e-8", stacklevel=2)
        self.knots = grid
        self.knot_values = F
        slopes = _monotone_slopes(grid, F, _on_grid(pdf.f, grid))
        self._spline = CubicHermiteSpline(grid, F, slopes)

    @property
    def total_mass(self) -> float:
        return float(self.knot_values[-1])

    def cdf(self, x):
        xa = np.asarray(x, dtype=float)
        if not self.iv.contains(xa):
            raise DomainError(f"x outside [{self.iv.a!r}, {self.iv.b!r}]")
        out = self._spline(xa)
        return float(out) if out.ndim == 0 else out

    def cdf_bundle(self) -> FunctionBundle:
        """``F`` as a function bundle: derivatives ``f``, ``f'``, ``f''``."""
        return FunctionBundle.from_callables(
            self.cdf, self.pdf.f, self.pdf.f1, self.pdf.f2, name=f"CDF of {self.pdf.source.label}"
        )


@dataclass(frozen=True)
class ExpectationBracket:
    center: float
    halfwidth: float
    theorem: pe.Theorem
    x: float

    @property
    def lower(self) -> float:
        return self.center - self.halfwidth

    @property
    def upper(self) -> float:
        return self.center + self.halfwidth

    def contains(self, value: float, slack: float = 0.0) -> bool:
        return self.lower - slack <= value <= self.upper + slack


def cdf(model: DensityModel, x):
    return model.cdf(x)


def expectation_reference(model: DensityModel, tol: float = 1e-12) -> float:
    """``b - int_a^b F`` with the oracle integrator on the interpolant's knots."""
    iv = model.iv
    res = reference_integral(model.cdf, iv.a, iv.b, tol=tol, initial_panels=len(model.knots) - 1)
    return iv.b - res.value


def cdf_constants(
    model: DensityModel,
    bounds: Optional[SecondDerivBounds] = None,
    n_samples: int = DEFAULT_SAMPLES,
    inflation: float = DEFAULT_INFLATION,
    ref_tol: float = DEFAULT_REF_TOL,
) -> SmoothnessConstants:
    """Smoothness constants of ``F``: bounds on ``f'``, ``S = (f(b)-f(a))/(b-a)``, ..."""
    F = model.cdf_bundle()
    iv = model.iv
    if bounds is None:
        bounds = estimate_second_deriv_bounds(F, iv, n_samples, inflation)
    return SmoothnessConstants(
        compute_S(F, iv), bounds, compute_sigma(F, iv, ref_tol), compute_l2_f3(F, iv, ref_tol)
    )


def expectation_bracket(
    model: DensityModel,
    x: float,
    tag: "str | pe.Theorem",
    constants: Optional[SmoothnessConstants] = None,
) -> ExpectationBracket:
    """Interval guaranteed (under the chosen bound's hypotheses) to contain ``E(X)``.

    With ``A`` the estimator of ``(1/(b-a)) int F`` and ``B`` its bound,
    the bracket is ``b - (b-a) A  +/-  (b-a) B``.
    """
    theorem = parse_tag(tag)
    iv = model.iv
    x = iv.check_point(x)
    if constants is None:
        constants = cdf_constants(model)
    F = model.cdf_bundle()
    S = constants.S
    b = constants.bounds
    needs_bounds = theorem in (pe.Theorem.GRUSS, pe.Theorem.MIDRANGE, pe.Theorem.S_GAMMA, pe.Theorem.GAMMA_S)
    if needs_bounds and b is None:
        raise DomainError(f"{theorem.value} needs bounds on f'")
    if theorem is pe.Theorem.MIDRANGE:
        A = pe.approx_perturbed_midrange(F, iv, x, b)
        B = pe.bound_midrange(iv, x, b)
    else:
        A = pe.approx_perturbed_S(F, iv, x, S)
        if theorem is pe.Theorem.GRUSS:
            B = pe.bound_gruss(iv, x, b)
        elif theorem is pe.Theorem.S_GAMMA:
            B = pe.bound_s_gamma(iv, x, S, b.gamma)
        elif theorem is pe.Theorem.GAMMA_S:
            B = pe.bound_gamma_s(iv, x, b.Gamma, S)
        elif theorem is pe.Theorem.L2_THIRD:
            if constants.l2_f3 is None:
                raise DomainError("l2_third_24 needs ||f''||_2 of the density")
            B = pe.bound_l2_third(iv, x, constants.l2_f3)
        else:
            if constants.sigma is None:
                raise DomainError("variance_25 needs sigma of the density derivative")
            B = pe.bound_variance(iv, x, constants.sigma)
    return ExpectationBracket(iv.b - iv.width * A, iv.width * B, theorem, x)
