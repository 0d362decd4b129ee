"""Parameter records for the general Heun equation

    y'' + (gamma/x + delta/(x-1) + epsilon/(x-a)) y'
        + (alpha*beta*x - q) / (x(x-1)(x-a)) y = 0,

with the exponent-sum constraint epsilon = alpha + beta - gamma - delta + 1.

epsilon is always derived from the stored fields, never accepted as an
independent input: an independently supplied epsilon invites inconsistent
states. All parameters are real; a != 0 locates the third finite regular
singular point.

The local exponents at x = 0 are 0 and 1 - gamma; local solutions are built
on one of these two indicial roots. An integer-valued 1 - gamma is flagged
here (the two roots then differ by an integer and the second-kind series
degenerates), but only series construction errors on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import NegativeBase, NonFinite, ZeroSingularity

__all__ = [
    "HeunParams",
    "IndicialRoot",
    "Normalization",
    "RootKind",
    "default_normalization",
    "indicial_roots",
    "make_params",
]


@dataclass(frozen=True)
class HeunParams:
    """The six free parameters of the equation; epsilon is derived."""

    a: float
    q: float
    alpha: float
    beta: float
    gamma: float
    delta: float

    @property
    def epsilon(self) -> float:
        return self.alpha + self.beta - self.gamma - self.delta + 1.0


class RootKind(Enum):
    FIRST = "first"
    SECOND = "second"


@dataclass(frozen=True)
class IndicialRoot:
    """One indicial root at x = 0.

    kind FIRST has lam == 0, kind SECOND has lam == 1 - gamma.
    degenerate is set when 1 - gamma is an integer (the two roots differ
    by an integer; second-kind series construction will refuse it).
    """

    kind: RootKind
    lam: float
    degenerate: bool = False


@dataclass(frozen=True)
class Normalization:
    """Leading series coefficient; must be nonzero."""

    c0: float

    def __post_init__(self) -> None:
        if self.c0 == 0.0 or not math.isfinite(self.c0):
            raise NonFinite("normalization c0 must be finite and nonzero")


def make_params(
    a: float, q: float, alpha: float, beta: float, gamma: float, delta: float
) -> HeunParams:
    """Validate and build a parameter record.

    Raises ZeroSingularity for a == 0 and NonFinite for any NaN/inf input.
    """
    values = (a, q, alpha, beta, gamma, delta)
    if not all(math.isfinite(v) for v in values):
        raise NonFinite(f"parameters must be finite, got {values}")
    if a == 0.0:
        raise ZeroSingularity("singularity location a must be nonzero")
    return HeunParams(float(a), float(q), float(alpha), float(beta), float(gamma), float(delta))


def _is_integer(x: float) -> bool:
    return x == math.floor(x)


def indicial_roots(p: HeunParams) -> tuple[IndicialRoot, IndicialRoot]:
    """Both indicial roots at x = 0, first kind (lam = 0) first."""
    second = 1.0 - p.gamma
    degenerate = _is_integer(second)
    return (
        IndicialRoot(RootKind.FIRST, 0.0),
        IndicialRoot(RootKind.SECOND, second, degenerate=degenerate),
    )


def default_normalization(r: IndicialRoot, p: HeunParams) -> Normalization:
    """c0 = 1 for the first kind, ((1+a)/a)^(1-gamma) for the second.

    The second-kind power needs (1+a)/a > 0 when 1 - gamma is non-integer;
    otherwise raises NegativeBase.
    """
    if r.kind is RootKind.FIRST:
        return Normalization(1.0)
    base = (1.0 + p.a) / p.a
    expo = 1.0 - p.gamma
    if base <= 0.0 and not _is_integer(expo):
        raise NegativeBase(
            f"(1+a)/a = {base} is not positive; real power with exponent {expo} undefined"
        )
    return Normalization(base**expo)
