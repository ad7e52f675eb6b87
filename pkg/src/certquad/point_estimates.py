"""Single-interval estimators of the mean value of f, each with an error bound.

Every estimator has the form

    [f(x) + f(a+b-x)]/2 - (x - q)[f'(x) - f'(a+b-x)]/2 + P * m(x)

with ``q = (3a+b)/4``, ``m`` the kernel mean and ``P`` a perturbation
coefficient: the secant slope ``S`` of ``f'`` or the midrange of ``f''``.
The special points ``x = a``, ``x = q`` and ``x = (a+b)/2`` need no separate
code; they are ordinary arguments of the general formulas.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

from .errors import DomainError, InvalidBoundsError
from .function_model import FunctionBundle, SecondDerivBounds, SmoothnessConstants, compute_S
from .kernel import (
    Interval,
    kernel_centered_l2sq,
    kernel_centered_sup,
    kernel_first_moment,
    perturbed_bracket,
)


class Theorem(str, enum.Enum):
    """Bound tags, in tie-breaking order."""

    GRUSS = "gruss_21"
    MIDRANGE = "midrange_22"
    S_GAMMA = "s_gamma_23"
    GAMMA_S = "gamma_s_23"
    L2_THIRD = "l2_third_24"
    VARIANCE = "variance_25"


@dataclass(frozen=True)
class PointEstimate:
    value: float
    bound: float
    theorem: Theorem
    x: float


def _slack(*values: float) -> float:
    return 1e-12 * max(1.0, *(abs(v) for v in values))


def approx_perturbed_S(bundle: FunctionBundle, iv: Interval, x: float, S: Optional[float] = None) -> float:
    """Estimator perturbed by the secant slope ``S = (f'(b)-f'(a))/(b-a)``."""
    if S is None:
        S = compute_S(bundle, iv)
    return perturbed_bracket(bundle.f, bundle.f1, iv, x) + S * kernel_first_moment(iv, x)


def approx_perturbed_midrange(
    bundle: FunctionBundle, iv: Interval, x: float, bounds: SecondDerivBounds
) -> float:
    """Estimator perturbed by ``(Gamma + gamma)/2``."""
    return perturbed_bracket(bundle.f, bundle.f1, iv, x) + bounds.center * kernel_first_moment(iv, x)


def bound_gruss(iv: Interval, x: float, bounds: SecondDerivBounds) -> float:
    x = iv.check_point(x)
    s = 0.25 * iv.width + abs(x - iv.quarter)
    return 0.125 * bounds.spread * s * s


def bound_midrange(iv: Interval, x: float, bounds: SecondDerivBounds) -> float:
    return 0.5 * bounds.spread * kernel_first_moment(iv, x)


def bound_s_gamma(iv: Interval, x: float, S: float, gamma: float) -> float:
    """``(S - gamma) * c(x)`` with ``c`` the centred kernel sup."""
    if S < gamma - _slack(S, gamma):
        raise InvalidBoundsError(f"S={S!r} below gamma={gamma!r}")
    return max(S - gamma, 0.0) * kernel_centered_sup(iv, x)


def bound_gamma_s(iv: Interval, x: float, Gamma: float, S: float) -> float:
    """``(Gamma - S) * c(x)``."""
    if S > Gamma + _slack(S, Gamma):
        raise InvalidBoundsError(f"S={S!r} above Gamma={Gamma!r}")
    return max(Gamma - S, 0.0) * kernel_centered_sup(iv, x)


def bound_l2_third(iv: Interval, x: float, l2_f3: float) -> float:
    """``||f'''||_2 / pi * sqrt(int (K - m)^2)``."""
    if l2_f3 < 0:
        raise DomainError(f"||f'''||_2 must be nonnegative, got {l2_f3!r}")
    return l2_f3 / math.pi * math.sqrt(kernel_centered_l2sq(iv, x))


def bound_variance(iv: Interval, x: float, sigma: float) -> float:
    """``sqrt(sigma) / (b-a) * sqrt(int (K - m)^2)``."""
    if sigma < 0:
        raise DomainError(f"sigma must be nonnegative, got {sigma!r}")
    return math.sqrt(sigma) / iv.width * math.sqrt(kernel_centered_l2sq(iv, x))


def all_estimates(
    bundle: FunctionBundle, iv: Interval, x: float, constants: SmoothnessConstants
) -> list[PointEstimate]:
    """Every (estimator, bound) pair the available constants allow.

    The midrange bound pairs with the midrange estimator; the other bounds
    all certify the secant-slope estimator.  The two centred-sup bounds are
    skipped when ``S`` falls outside ``[gamma, Gamma]``.
    """
    x = iv.check_point(x)
    S = constants.S
    with_s = approx_perturbed_S(bundle, iv, x, S)
    out = []
    b = constants.bounds
    if b is not None:
        out.append(PointEstimate(with_s, bound_gruss(iv, x, b), Theorem.GRUSS, x))
        out.append(
            PointEstimate(approx_perturbed_midrange(bundle, iv, x, b), bound_midrange(iv, x, b), Theorem.MIDRANGE, x)
        )
        # both need gamma <= S <= Gamma; either failing breaks the hypothesis
        try:
            pair = [
                PointEstimate(with_s, bound_s_gamma(iv, x, S, b.gamma), Theorem.S_GAMMA, x),
                PointEstimate(with_s, bound_gamma_s(iv, x, b.Gamma, S), Theorem.GAMMA_S, x),
            ]
        except InvalidBoundsError:
            pair = []
        out.extend(pair)
    if constants.l2_f3 is not None:
        out.append(PointEstimate(with_s, bound_l2_third(iv, x, constants.l2_f3), Theorem.L2_THIRD, x))
    if constants.sigma is not None:
        out.append(PointEstimate(with_s, bound_variance(iv, x, constants.sigma), Theorem.VARIANCE, x))
    return out


def best_estimate(
    bundle: FunctionBundle, iv: Interval, x: float, constants: SmoothnessConstants
) -> PointEstimate:
    """The pair with the smallest bound; ties go to the earlier theorem."""
    candidates = all_estimates(bundle, iv, x, constants)
    if not candidates:
        raise DomainError("no smoothness constants available to bound the estimate")
    order = list(Theorem)
    return min(candidates, key=lambda e: (e.bound, order.index(e.theorem)))
