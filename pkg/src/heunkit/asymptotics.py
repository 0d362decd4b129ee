"""Large-n closed forms and the convergence-region classifier.

As n grows the recurrence coefficients approach constants,

    A_n -> (1+a)/a,    B_n -> -1/a,

and freezing them there turns the series into an elementary model whose
sum is geometric: y ~ 1/(1 - f(x)) with f(x) = -x^2/a + (1+a)x/a. The
region |f(x)| < 1 is where the frozen-coefficient model (and empirically
the true series) converges; its boundary solves two quadratics whose roots
are {1, a} (f = +1) and (1/2)[(1+a) +- sqrt(a^2+6a+1)] (f = -1).

Two special balances have their own one-term models: a near -1 (the A-type
stream is negligible; only even powers survive) and |a| >> 1 (the B-type
stream is negligible; a pure binomial/geometric chain in x remains).

The tail functions here are model asymptotics of that frozen-coefficient
heuristic, not values of the true Heun function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import OutsideRegion
from .params import HeunParams

__all__ = [
    "ABranch",
    "AsymptoticLimit",
    "RegionReport",
    "classify_region",
    "convergence_factor",
    "geometric_tail",
    "limit_coeffs",
    "tail_large_a",
    "tail_near_minus_one",
]

# a-values where the f = -1 quadratic has a double root
_A_SPECIAL_LOW = -3.0 - 2.0 * math.sqrt(2.0)
_A_SPECIAL_HIGH = -3.0 + 2.0 * math.sqrt(2.0)
_SPECIAL_TOL = 1e-12


class ABranch(Enum):
    """The eight branches of the region table, keyed by a."""

    ZERO = "a = 0 (no solution)"
    ONE = "a = 1"
    BETWEEN_ZERO_AND_ONE = "0 < a < 1"
    ABOVE_ONE = "a > 1"
    NEG_DOUBLE_ROOT_LOW = "a = -3 - 2*sqrt(2)"
    NEG_DOUBLE_ROOT_HIGH = "a = -3 + 2*sqrt(2)"
    NEG_SINGLE_INTERVAL = "-3 - 2*sqrt(2) < a < -3 + 2*sqrt(2)"
    NEG_SPLIT = "-3 + 2*sqrt(2) < a < 0 or a < -3 - 2*sqrt(2)"


@dataclass(frozen=True)
class RegionReport:
    a_branch: ABranch
    intervals: tuple[tuple[float, float], ...]
    contains_x: bool


@dataclass(frozen=True)
class AsymptoticLimit:
    a_inf: float
    b_inf: float


def limit_coeffs(p: HeunParams) -> AsymptoticLimit:
    """Limits of the two recurrence coefficient streams as n -> infinity."""
    return AsymptoticLimit(a_inf=(1.0 + p.a) / p.a, b_inf=-1.0 / p.a)


def convergence_factor(a: float, x: float) -> float:
    """f(x) = -x^2/a + (1+a)x/a; the region condition is |f(x)| < 1."""
    return (-x * x + (1.0 + a) * x) / a


def geometric_tail(p: HeunParams, x: float) -> float:
    """Closed form 1/(1 - f(x)) of the frozen-coefficient model series."""
    f = convergence_factor(p.a, x)
    if abs(f) >= 1.0:
        raise OutsideRegion(f"|f(x)| = {abs(f)} >= 1 at x = {x}")
    return 1.0 / (1.0 - f)


def tail_near_minus_one(p: HeunParams, x: float) -> float:
    """Model closed form 1/(1 + x^2/a) for a near -1 (even powers only).

    The odd companion stream is dropped here (its leading weight carries
    the vanishing factor (1+a)); the condition is |x^2/a| < 1.
    """
    g = x * x / p.a
    if abs(g) >= 1.0:
        raise OutsideRegion(f"|x^2/a| = {abs(g)} >= 1 at x = {x}")
    return 1.0 / (1.0 + g)


def tail_large_a(p: HeunParams, x: float) -> float:
    """Binomial-chain closed form 1/(1 - ((1+a)/a) x) for |a| >> 1."""
    g = (1.0 + p.a) / p.a * x
    if abs(g) >= 1.0:
        raise OutsideRegion(f"|(1+a)x/a| = {abs(g)} >= 1 at x = {x}")
    return 1.0 / (1.0 - g)


def _neg_one_roots(a: float) -> tuple[float, float]:
    """Roots of f(x) = -1, i.e. x^2 - (1+a)x - a = 0, ascending."""
    disc = a * a + 6.0 * a + 1.0
    s = math.sqrt(max(disc, 0.0))
    lo = 0.5 * ((1.0 + a) - s)
    hi = 0.5 * ((1.0 + a) + s)
    return lo, hi


def classify_region(a: float, x: float) -> RegionReport:
    """Region-table row for a, with interval endpoints and membership of x.

    Intervals are open: boundary points (|f| = 1 exactly) are outside.
    The two negative double-root rows apply only within 1e-12 of the exact
    special values; nearby a uses the generic quadratic-root formulas (the
    rows are limiting cases of the same quadratic). Membership from the
    row intervals is cross-checked against the raw inequality |f(x)| < 1;
    a disagreement (only possible in a rounding sliver at an endpoint)
    defers to the raw inequality.
    """
    if a == 0.0:
        return RegionReport(ABranch.ZERO, (), False)

    if a == 1.0:
        branch = ABranch.ONE
        lo, hi = _neg_one_roots(a)  # 1 - sqrt(2), 1 + sqrt(2)
        intervals = ((lo, 1.0), (1.0, hi))
    elif 0.0 < a < 1.0:
        branch = ABranch.BETWEEN_ZERO_AND_ONE
        lo, hi = _neg_one_roots(a)
        intervals = ((lo, a), (1.0, hi))
    elif a > 1.0:
        branch = ABranch.ABOVE_ONE
        lo, hi = _neg_one_roots(a)
        intervals = ((lo, 1.0), (a, hi))
    elif abs(a - _A_SPECIAL_LOW) <= _SPECIAL_TOL:
        branch = ABranch.NEG_DOUBLE_ROOT_LOW
        mid = 0.5 * (1.0 + a)
        intervals = ((a, mid), (mid, 1.0))
    elif abs(a - _A_SPECIAL_HIGH) <= _SPECIAL_TOL:
        branch = ABranch.NEG_DOUBLE_ROOT_HIGH
        mid = 0.5 * (1.0 + a)
        intervals = ((a, mid), (mid, 1.0))
    elif _A_SPECIAL_LOW < a < _A_SPECIAL_HIGH:
        branch = ABranch.NEG_SINGLE_INTERVAL
        intervals = ((a, 1.0),)
    else:
        branch = ABranch.NEG_SPLIT
        lo, hi = _neg_one_roots(a)
        intervals = ((a, lo), (hi, 1.0))

    contains = any(lo < x < hi for lo, hi in intervals)
    raw = abs(convergence_factor(a, x)) < 1.0
    if contains != raw:
        contains = raw
    return RegionReport(branch, intervals, contains)
