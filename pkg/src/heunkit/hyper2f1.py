"""Pochhammer symbols and the Gauss hypergeometric series.

Direct series summation only: every use in this package has its argument
strictly inside the unit disk or terminates, so no transformation formulas
are applied. Terminating series (first or second upper parameter a
nonpositive integer) are computed exactly as finite sums regardless of the
argument's magnitude.
"""

from __future__ import annotations

import numpy as np

from .errors import MaxTermsExceeded, NoConvergence, PoleAtC

__all__ = ["f21_coefficients", "gauss_2f1", "pochhammer"]

DEFAULT_TOL = 1e-14
DEFAULT_MAX_TERMS = 10_000


def pochhammer(x: float, n: int) -> float:
    """Rising factorial x(x+1)...(x+n-1); the empty product is 1.

    Exact zero when x is a nonpositive integer with -x < n (a factor
    vanishes), which is the termination mechanism the series evaluators
    rely on.
    """
    if n < 0:
        raise ValueError("pochhammer order must be nonnegative")
    out = 1.0
    for k in range(n):
        out *= x + k
    return out


def _termination_index(a: float, b: float) -> int | None:
    """Smallest n with (a)_n or (b)_n == 0 forever after, else None."""
    candidates = []
    for v in (a, b):
        if v <= 0.0 and v == int(v):
            candidates.append(int(-v) + 1)
    return min(candidates) if candidates else None


def f21_coefficients(a: float, b: float, c: float, n_terms: int) -> np.ndarray:
    """First n_terms series coefficients e_k of 2F1(a, b; c; z).

    e_k = (a)_k (b)_k / ((c)_k k!), built by the term recurrence
    e_{k+1} = e_k (a+k)(b+k)/((c+k)(k+1)). Raises PoleAtC if (c)_k hits
    zero before the series terminates.
    """
    n_stop = _termination_index(a, b)
    e = np.zeros(n_terms)
    e[0] = 1.0
    for k in range(n_terms - 1):
        if n_stop is not None and k + 1 >= n_stop:
            break
        denom = (c + k) * (k + 1)
        if denom == 0.0:
            raise PoleAtC(f"lower parameter c={c} is a nonpositive integer hit at k={k}")
        e[k + 1] = e[k] * (a + k) * (b + k) / denom
    return e


def gauss_2f1(
    a: float,
    b: float,
    c: float,
    z: float,
    tol: float = DEFAULT_TOL,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> float:
    """Partial sum of the Gauss series with relative tail estimate <= tol.

    Terminating series are summed exactly (finite sum) for any z. For
    non-terminating series |z| < 1 is required (NoConvergence otherwise),
    and MaxTermsExceeded is raised if the tolerance is not met within
    max_terms terms.
    """
    n_stop = _termination_index(a, b)
    if n_stop is not None:
        total = 0.0
        term = 1.0
        for k in range(n_stop):
            total += term * z**k
            denom = (c + k) * (k + 1)
            if denom == 0.0 and k + 1 < n_stop:
                raise PoleAtC(f"lower parameter c={c} hits its pole at k={k} before termination")
            if k + 1 < n_stop:
                term *= (a + k) * (b + k) / denom
        return total

    if z == 0.0:
        return 1.0
    if abs(z) >= 1.0:
        raise NoConvergence(f"|z| = {abs(z)} >= 1 for a non-terminating series")

    total = 1.0
    term = 1.0
    small_streak = 0
    for k in range(max_terms):
        denom = (c + k) * (k + 1)
        if denom == 0.0:
            raise PoleAtC(f"lower parameter c={c} is a nonpositive integer hit at k={k}")
        term *= (a + k) * (b + k) / denom * z
        total += term
        # two consecutive small terms: adjacent terms can vanish accidentally
        if abs(term) <= tol * abs(total):
            small_streak += 1
            if small_streak >= 2:
                return total
        else:
            small_streak = 0
    raise MaxTermsExceeded(f"no convergence to tol={tol} within {max_terms} terms")
