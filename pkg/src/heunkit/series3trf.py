"""Reorganized nested-sum expansions of the local Heun series.

The direct series sum_n c_n x^(n+lam) is regrouped by how many A-type
recurrence factors a coefficient product contains: y(x) = sum_m y_m(x),
where y_m collects exactly m A-factors and carries eta^m with

    z = -(1/a) x^2,        eta = ((1+a)/a) x.

Each y_m is a nested sum over a nondecreasing index chain
i_0 <= i_1 <= ... <= i_m (i_k counts B-type factors preceding the
(k+1)-th A-factor; i_m is the total B-count, so the chain term carries
x^(m + 2 i_m + lam)). The chain value is

    prod_{k=0}^{m-1} W_k(i_k) * L_0(i_0) * prod_{k=1}^{m} R_k(i_{k-1}, i_k) * z^(i_m)

with stage weights

    W_k(i) = [(i + k/2 + lam/2)(i + Gamma_k) + Q] /
             [(i + (k+1)/2 + lam/2)(i + (k+gamma)/2 + lam/2)],

Q = q / (4(1+a)), and ladder blocks L_0 / R_k built from rising-factorial
ratios. W_k(i) equals a/(1+a) times the recurrence coefficient A_{2i+k},
and the ladder blocks reproduce the B-factor products exactly, so the
regrouped sum is term-for-term the direct series (the identity the
acceptance suite checks to 1e-10).

Three variants share the machinery:

  INFINITE   all chains unbounded (numerically capped at I_max); ladder
             numerators ((k+alpha+lam)/2 + j)((k+beta+lam)/2 + j).
  POLY_S     first numerator parameter replaced per level by an integer
             cap sequence alpha_k (alpha anchored as alpha = -2*caps[0] - lam):
             numerator factor (-alpha_k + j) makes every chain finite.
  POLY_B     both numerator parameters capped (alpha and beta sequences,
             requiring alpha_k <= beta_k).

The weights divide by (1+a); a within 1e-12 of -1 raises DegenerateA and
callers should use the near -1 asymptotic branch instead (eta vanishes
there, so the limit is finite but numerically indeterminate in this form).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import (
    CapsNotMonotone,
    DegenerateA,
    DegenerateSecondKind,
    InconsistentParameterization,
    NegativeBase,
    NonIntegerCap,
)
from .params import HeunParams, IndicialRoot, Normalization, RootKind

__all__ = [
    "DEFAULT_INNER_CAP",
    "DEFAULT_OUTER_TERMS",
    "SubSeriesSpec",
    "TrfEvaluation",
    "TrfWeights",
    "Variant",
    "build_3trf_infinite",
    "build_3trf_poly_Bterm",
    "coefficient_of_order",
    "zeta_eta",
]

DEFAULT_OUTER_TERMS = 30
DEFAULT_INNER_CAP = 60
_A_GUARD = 1e-12


class Variant(Enum):
    INFINITE = "infinite"
    POLY_S = "poly-single-terminated"
    POLY_B = "poly-both-terminated"


@dataclass(frozen=True)
class SubSeriesSpec:
    """Shape of one y_m block: A-factor count and inner-index bounds."""

    m: int
    index_caps: tuple[int, ...]
    variant: Variant

    def __post_init__(self) -> None:
        if self.variant is Variant.INFINITE:
            if len(self.index_caps) != 1 or self.index_caps[0] < 1:
                raise ValueError("infinite variant takes a single uniform cap >= 1")
        else:
            if any(a > b for a, b in zip(self.index_caps, self.index_caps[1:])):
                raise CapsNotMonotone(f"caps {self.index_caps} decrease")


@dataclass(frozen=True)
class TrfWeights:
    """Stage-weight constants at one level of the nested sums."""

    gamma_k: float
    q_weight: float


@dataclass(frozen=True)
class TrfEvaluation:
    """Value of the regrouped sum plus per-m partials for diagnostics."""

    value: float
    partials: tuple[float, ...] = field(repr=False)
    z: float
    eta: float

    @property
    def tail_estimate(self) -> float:
        return abs(self.partials[-1]) if self.partials else 0.0


def zeta_eta(p: HeunParams, x: float) -> tuple[float, float]:
    """The two composite variables (z, eta) of the regrouped expansion."""
    return -(x * x) / p.a, (1.0 + p.a) / p.a * x


def _q_weight(p: HeunParams) -> float:
    # Divisor 4 makes W_k(i) == a/(1+a) * A_{2i+k} exactly (the factor the
    # leading (n+lam) and the (1+a) grouping contribute is 4, not 2).
    return p.q / (4.0 * (1.0 + p.a))


def _guard(p: HeunParams, r: IndicialRoot) -> None:
    if abs(1.0 + p.a) <= _A_GUARD:
        raise DegenerateA(f"1+a = {1.0 + p.a}; use the near -1 asymptotic branch")
    if r.kind is RootKind.SECOND and r.degenerate:
        raise DegenerateSecondKind(f"1-gamma = {r.lam} is an integer")


def _leading_factor(x: float, lam: float) -> float:
    if lam == 0.0:
        return 1.0
    if x == 0.0:
        if lam > 0.0:
            return 0.0
        raise NegativeBase("x = 0 with a negative leading exponent")
    if x < 0.0 and lam != math.floor(lam):
        raise NegativeBase(f"x = {x} < 0 with non-integer leading exponent {lam}")
    return x**lam


def _cap_at(caps: Sequence[int], level: int) -> int:
    return caps[min(level, len(caps) - 1)]


def stage_weights(
    variant: Variant,
    p: HeunParams,
    lam: float,
    level: int,
    caps: Sequence[int] | None = None,
    beta_caps: Sequence[int] | None = None,
) -> TrfWeights:
    """Gamma_k and Q for stage `level` of the chosen variant."""
    two = 2.0 * (1.0 + p.a)
    k = level
    if variant is Variant.INFINITE:
        g = (p.alpha + p.beta - p.delta + k + lam + p.a * (p.delta + p.gamma - 1.0 + k + lam)) / two
    elif variant is Variant.POLY_S:
        g = (-2.0 * _cap_at(caps, k) + p.beta - p.delta + p.a * (p.delta + p.gamma + lam + k - 1.0)) / two
    else:
        g = (
            -2.0 * _cap_at(caps, k)
            - 2.0 * _cap_at(beta_caps, k)
            - k
            - p.delta
            - lam
            + p.a * (p.delta + p.gamma + k - 1.0 + lam)
        ) / two
    return TrfWeights(gamma_k=g, q_weight=_q_weight(p))


def _ladder_factor(
    variant: Variant,
    p: HeunParams,
    lam: float,
    level: int,
    j: int,
    caps: Sequence[int] | None,
    beta_caps: Sequence[int] | None,
) -> float:
    """Ratio of consecutive ladder entries at `level`, step j -> j+1."""
    den = (1.0 + level / 2.0 + lam / 2.0 + j) * (0.5 + level / 2.0 + p.gamma / 2.0 + lam / 2.0 + j)
    if variant is Variant.INFINITE:
        num = (level / 2.0 + p.alpha / 2.0 + lam / 2.0 + j) * (level / 2.0 + p.beta / 2.0 + lam / 2.0 + j)
    elif variant is Variant.POLY_S:
        num = (-_cap_at(caps, level) + j) * (level / 2.0 + p.beta / 2.0 + lam / 2.0 + j)
    else:
        num = (-_cap_at(caps, level) + j) * (-_cap_at(beta_caps, level) + j)
    return num / den


def _start_vector(
    variant: Variant,
    p: HeunParams,
    lam: float,
    size: int,
    caps: Sequence[int] | None,
    beta_caps: Sequence[int] | None,
) -> np.ndarray:
    v = np.empty(size)
    v[0] = 1.0
    for i in range(size - 1):
        v[i + 1] = v[i] * _ladder_factor(variant, p, lam, 0, i, caps, beta_caps)
    return v


def _advance(
    v: np.ndarray,
    variant: Variant,
    p: HeunParams,
    lam: float,
    stage: int,
    out_size: int,
    caps: Sequence[int] | None,
    beta_caps: Sequence[int] | None,
) -> np.ndarray:
    """One more A-factor: weight stage `stage`, then climb ladder stage+1.

    s[i'] = sum_{i <= i'} W_stage(i) v[i] prod_{j=i}^{i'-1} f_{stage+1}(j),
    accumulated forward so vanishing ladder factors never divide.
    """
    w = stage_weights(variant, p, lam, stage, caps, beta_caps)
    qw = w.q_weight
    wv = np.zeros(out_size)
    upto = min(len(v), out_size)
    for i in range(upto):
        num = (i + stage / 2.0 + lam / 2.0) * (i + w.gamma_k) + qw
        den = (i + (stage + 1.0) / 2.0 + lam / 2.0) * (i + (stage + p.gamma) / 2.0 + lam / 2.0)
        wv[i] = num / den * v[i]
    s = np.zeros(out_size)
    s[0] = wv[0]
    for i in range(1, out_size):
        f = _ladder_factor(variant, p, lam, stage + 1, i - 1, caps, beta_caps)
        s[i] = s[i - 1] * f + wv[i]
    return s


def _partial_value(v: np.ndarray, z: float) -> float:
    # ascending-power Horner; high powers folded in last
    acc = 0.0
    for c in v[::-1]:
        acc = acc * z + c
    return acc


def build_3trf_infinite(
    p: HeunParams,
    r: IndicialRoot,
    c0: Normalization,
    M: int = DEFAULT_OUTER_TERMS,
    I_max: int = DEFAULT_INNER_CAP,
    x: float = 0.0,
    early_stop_tol: float = 1e-16,
) -> TrfEvaluation:
    """sum_{m<=M} y_m(x) with every chain index capped at I_max.

    Stops early once two consecutive blocks fall below
    early_stop_tol * |accumulated| (consecutive because the blocks carry
    alternating x-parity); pass 0 to always sum all M+1 blocks.
    Region membership is the caller's job (see asymptotics.classify_region).
    """
    _guard(p, r)
    if I_max < 1:
        raise ValueError("I_max must be >= 1")
    lam = r.lam
    z, eta = zeta_eta(p, x)
    lead = c0.c0 * _leading_factor(x, lam)
    v = _start_vector(Variant.INFINITE, p, lam, I_max + 1, None, None)
    partials = []
    total = 0.0
    small = 0
    for m in range(M + 1):
        if m > 0:
            v = _advance(v, Variant.INFINITE, p, lam, m - 1, I_max + 1, None, None)
        ym = lead * _partial_value(v, z) * eta**m
        partials.append(ym)
        total += ym
        if early_stop_tol > 0.0 and m >= 1:
            if abs(ym) < early_stop_tol * max(abs(total), 1e-300):
                small += 1
                if small >= 2:
                    break
            else:
                small = 0
    return TrfEvaluation(value=total, partials=tuple(partials), z=z, eta=eta)


def _validate_caps(caps: Sequence[int], what: str) -> tuple[int, ...]:
    if len(caps) == 0:
        raise ValueError(f"{what} must be nonempty")
    out = []
    for c in caps:
        if isinstance(c, bool) or c != int(c) or c < 0:
            raise NonIntegerCap(f"{what} entries must be nonnegative integers, got {c}")
        out.append(int(c))
    if any(a > b for a, b in zip(out, out[1:])):
        raise CapsNotMonotone(f"{what} {tuple(out)} decrease")
    return tuple(out)


def _check_anchor(value: float, cap0: int, lam: float, name: str) -> None:
    want = -2.0 * cap0 - lam
    if abs(value - want) > 1e-12 * max(1.0, abs(want)):
        raise InconsistentParameterization(
            f"{name} = {value} does not match -2*caps[0] - lam = {want}"
        )


def build_3trf_poly_Bterm(
    p: HeunParams,
    r: IndicialRoot,
    c0: Normalization,
    caps: Sequence[int],
    x: float,
    variant: Variant = Variant.POLY_S,
    beta_caps: Sequence[int] | None = None,
    M: int = DEFAULT_OUTER_TERMS,
    early_stop_tol: float = 1e-16,
) -> TrfEvaluation:
    """Finite nested chains: level k capped at caps[k] (last entry repeats).

    POLY_S requires alpha == -2*caps[0] - lam (the level-0 anchor of the
    termination parameterization); POLY_B additionally requires
    beta == -2*beta_caps[0] - lam and caps[k] <= beta_caps[k] for all k.
    The outer eta-sum is still infinite and truncated at M.
    """
    _guard(p, r)
    caps = _validate_caps(caps, "caps")
    lam = r.lam
    if variant is Variant.POLY_S:
        if beta_caps is not None:
            raise ValueError("beta_caps only applies to the both-terminated variant")
        _check_anchor(p.alpha, caps[0], lam, "alpha")
    elif variant is Variant.POLY_B:
        if beta_caps is None:
            raise ValueError("both-terminated variant needs beta_caps")
        beta_caps = _validate_caps(beta_caps, "beta_caps")
        _check_anchor(p.alpha, caps[0], lam, "alpha")
        _check_anchor(p.beta, beta_caps[0], lam, "beta")
        span = max(len(caps), len(beta_caps), M + 1)
        for k in range(span):
            if _cap_at(caps, k) > _cap_at(beta_caps, k):
                raise InconsistentParameterization(
                    f"caps[{k}] = {_cap_at(caps, k)} exceeds beta_caps[{k}] = {_cap_at(beta_caps, k)}"
                )
    else:
        raise ValueError("variant must be POLY_S or POLY_B")

    z, eta = zeta_eta(p, x)
    lead = c0.c0 * _leading_factor(x, lam)
    v = _start_vector(variant, p, lam, caps[0] + 1, caps, beta_caps)
    partials = []
    total = 0.0
    small = 0
    for m in range(M + 1):
        if m > 0:
            v = _advance(v, variant, p, lam, m - 1, _cap_at(caps, m) + 1, caps, beta_caps)
        ym = lead * _partial_value(v, z) * eta**m
        partials.append(ym)
        total += ym
        if early_stop_tol > 0.0 and m >= 1:
            if abs(ym) < early_stop_tol * max(abs(total), 1e-300):
                small += 1
                if small >= 2:
                    break
            else:
                small = 0
    return TrfEvaluation(value=total, partials=tuple(partials), z=z, eta=eta)


def coefficient_of_order(
    p: HeunParams,
    r: IndicialRoot,
    c0: Normalization,
    k: int,
    M: int | None = None,
    I_max: int | None = None,
) -> float:
    """Coefficient of x^(lam+k) reassembled from the regrouped chains.

    A chain with m A-factors and top index i_m contributes at order
    m + 2 i_m, so c_k collects every (m, i_m = (k-m)/2) of matching parity
    weighted by ((1+a)/a)^m (-1/a)^((k-m)/2). Equals the direct-recurrence
    c_k (the reorganization identity).
    """
    if k < 0:
        raise ValueError("order must be nonnegative")
    _guard(p, r)
    M = k if M is None else M
    I_max = max(1, (k + 1) // 2) if I_max is None else I_max
    if M < k:
        raise ValueError(f"M = {M} < k = {k}: chains with {k} A-factors are needed")
    if 2 * I_max < k:
        raise ValueError(f"I_max = {I_max} too small for order {k}")
    lam = r.lam
    a_pow = (1.0 + p.a) / p.a
    b_pow = -1.0 / p.a
    v = _start_vector(Variant.INFINITE, p, lam, I_max + 1, None, None)
    total = 0.0
    for m in range(k + 1):
        if m > 0:
            v = _advance(v, Variant.INFINITE, p, lam, m - 1, I_max + 1, None, None)
        if (k - m) % 2 == 0:
            i_top = (k - m) // 2
            total += v[i_top] * a_pow**m * b_pow**i_top
    return c0.c0 * total
