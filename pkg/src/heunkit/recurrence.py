"""The exact three-term recurrence and the direct Frobenius series evaluator.

Plugging y(x) = sum_n c_n x^(n+lam) into the Heun equation gives

    c_{n+1} = A_n c_n + B_n c_{n-1},   c_1 = A_0 c_0,

    A_n = [(n+lam)(n-1+gamma+epsilon+lam + a(n-1+gamma+lam+delta)) + q]
          / [a (n+1+lam)(n+gamma+lam)]
    B_n = -(n-1+lam+alpha)(n-1+lam+beta) / [a (n+1+lam)(n+gamma+lam)]

This module is the ground-truth oracle for every other evaluation path in
the package: the reorganized nested sums, the sub-integral forms, and the
transformed local solutions are all verified against it.

Coefficients are accumulated in extended precision (longdouble) internally
(recurrences amplify rounding) and emitted as standard doubles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateSecondKind,
    NegativeBase,
    SingularDenominator,
    SingularPoint,
)
from .params import HeunParams, IndicialRoot, Normalization, RootKind

__all__ = [
    "RecurrenceCoeffs",
    "SeriesEval",
    "SeriesSolution",
    "build_series",
    "coeff_A",
    "coeff_B",
    "eval_series",
    "eval_series_derivs",
    "ode_residual",
]


@dataclass(frozen=True)
class RecurrenceCoeffs:
    n: int
    A_n: float
    B_n: float


@dataclass(frozen=True)
class SeriesSolution:
    """Truncated Frobenius series: coeffs[n] multiplies x^(n+root.lam)."""

    root: IndicialRoot
    c0: float
    coeffs: np.ndarray
    truncation_order: int


@dataclass(frozen=True)
class SeriesEval:
    """Partial-sum value plus the magnitude of the last term kept."""

    value: float
    tail: float


def _denominator(p: HeunParams, lam: float, n: int) -> float:
    first = n + 1.0 + lam
    second = n + p.gamma + lam
    if first == 0.0:
        raise SingularDenominator(n, "(n+1+lam)")
    if second == 0.0:
        raise SingularDenominator(n, "(n+gamma+lam)")
    return p.a * first * second


def coeff_A(p: HeunParams, r: IndicialRoot, n: int) -> float:
    den = _denominator(p, r.lam, n)
    lam = r.lam
    num = (n + lam) * (
        n - 1.0 + p.gamma + p.epsilon + lam + p.a * (n - 1.0 + p.gamma + lam + p.delta)
    ) + p.q
    return num / den


def coeff_B(p: HeunParams, r: IndicialRoot, n: int) -> float:
    den = _denominator(p, r.lam, n)
    lam = r.lam
    return -((n - 1.0 + lam + p.alpha) * (n - 1.0 + lam + p.beta)) / den


def build_series(
    p: HeunParams, r: IndicialRoot, c0: Normalization, N: int
) -> SeriesSolution:
    """Coefficients c_0..c_N of the local Frobenius series.

    Second-kind roots with integer 1-gamma are refused: the recurrence
    denominators hit integer zeros and the logarithmic companion solution
    is out of scope.
    """
    if N < 0:
        raise ValueError("truncation order must be nonnegative")
    if r.kind is RootKind.SECOND and r.degenerate:
        raise DegenerateSecondKind(
            f"1-gamma = {r.lam} is an integer; second-kind series undefined here"
        )
    lam = np.longdouble(r.lam)
    a = np.longdouble(p.a)
    q = np.longdouble(p.q)
    alpha = np.longdouble(p.alpha)
    beta = np.longdouble(p.beta)
    gamma = np.longdouble(p.gamma)
    delta = np.longdouble(p.delta)
    epsilon = alpha + beta - gamma - delta + 1.0

    c = np.zeros(N + 1, dtype=np.longdouble)
    c[0] = np.longdouble(c0.c0)
    prev_b_num = None
    for n in range(N):
        d1 = n + 1.0 + lam
        d2 = n + gamma + lam
        if float(d1) == 0.0:
            raise SingularDenominator(n, "(n+1+lam)")
        if float(d2) == 0.0:
            raise SingularDenominator(n, "(n+gamma+lam)")
        den = a * d1 * d2
        a_n = ((n + lam) * (n - 1.0 + gamma + epsilon + lam + a * (n - 1.0 + gamma + lam + delta)) + q) / den
        if n == 0:
            c[1] = a_n * c[0]
        else:
            b_n = -((n - 1.0 + lam + alpha) * (n - 1.0 + lam + beta)) / den
            c[n + 1] = a_n * c[n] + b_n * c[n - 1]
    return SeriesSolution(
        root=r,
        c0=c0.c0,
        coeffs=np.asarray(c, dtype=np.float64),
        truncation_order=N,
    )


def _powers(s: SeriesSolution, x: float) -> np.ndarray:
    lam = s.root.lam
    n = np.arange(s.coeffs.size)
    if x == 0.0:
        out = np.zeros(s.coeffs.size)
        if lam == 0.0:
            out[0] = 1.0
        elif lam < 0.0:
            raise SingularPoint("x = 0 with a negative indicial root")
        return out
    if x < 0.0 and lam != math.floor(lam):
        raise NegativeBase(f"x = {x} < 0 with non-integer exponent offset {lam}")
    return np.power(x, n + lam)


def eval_series(s: SeriesSolution, x: float) -> SeriesEval:
    """Partial sum sum_n c_n x^(n+lam) plus last-term magnitude.

    Convergence-region membership is the caller's responsibility (the
    asymptotics module classifies it); nothing is enforced here.
    """
    pw = _powers(s, x)
    terms = s.coeffs * pw
    # Horner on the tail-reversed terms is equivalent to an ordered sum here;
    # summing ascending keeps small high-order terms from being absorbed early.
    value = float(np.sum(terms[::-1]))
    return SeriesEval(value=value, tail=float(abs(terms[-1])))


def eval_series_derivs(s: SeriesSolution, x: float) -> tuple[float, float, float]:
    """(y, y', y'') by exact term-wise differentiation of the series."""
    lam = s.root.lam
    n = np.arange(s.coeffs.size)
    e = n + lam
    if x == 0.0:
        raise SingularPoint("derivatives at the expansion point x = 0 are not needed; pick x != 0")
    if x < 0.0 and lam != math.floor(lam):
        raise NegativeBase(f"x = {x} < 0 with non-integer exponent offset {lam}")
    base = np.power(x, e)
    y = float(np.sum((s.coeffs * base)[::-1]))
    y1 = float(np.sum((s.coeffs * e * base)[::-1])) / x
    y2 = float(np.sum((s.coeffs * e * (e - 1.0) * base)[::-1])) / (x * x)
    return y, y1, y2


def ode_residual(p: HeunParams, s: SeriesSolution, x: float, h: float = 0.0) -> float:
    """|y'' + (gamma/x + delta/(x-1) + epsilon/(x-a)) y' + (alpha*beta*x - q) y / (x(x-1)(x-a))|.

    Derivatives are analytic (term-wise) by default; h > 0 switches to a
    central finite-difference cross-check with step h.
    """
    for sing, name in ((0.0, "0"), (1.0, "1"), (p.a, "a")):
        if x == sing:
            raise SingularPoint(f"x = {x} is the regular singular point {name}")
    if h > 0.0:
        y = eval_series(s, x).value
        yp = eval_series(s, x + h).value
        ym = eval_series(s, x - h).value
        y1 = (yp - ym) / (2.0 * h)
        y2 = (yp - 2.0 * y + ym) / (h * h)
    else:
        y, y1, y2 = eval_series_derivs(s, x)
    pcoef = p.gamma / x + p.delta / (x - 1.0) + p.epsilon / (x - p.a)
    qcoef = (p.alpha * p.beta * x - p.q) / (x * (x - 1.0) * (x - p.a))
    return abs(y2 + pcoef * y1 + qcoef * y)
