"""Numerical realization of the sub-integral representations.

Each regrouped block y_n(x) of the nested-sum expansion has an equivalent
n-level integral form. One level consists of

  * a pair of unit-interval integrals in (t, u) carrying Beta-kernel
    weights t^(i + (l+lam)/2 - 1) (1-t)^j and u^(i + (l-3+gamma+lam)/2) (1-u)^j,
  * a closed contour in v around 0 whose only role is to certify a series
    identity, and
  * a first-order operator acting on the level's composite variable w:
    for f(w) = sum_k e_k w^k it multiplies term k by
    (k + (l-1+lam)/2)(k + Omega_{l-1}) + Q.

Realization choices:

  * The (t, u) integrals are evaluated by Gauss-Jacobi rules whose weight
    exponent matches the actual (level, power) exponent, so the remaining
    integrand is the polynomial (1-t)^j and the rule is exact (the plain
    Legendre rule converges only algebraically for fractional exponents).
    Exponents at or below -1 raise DivergentIntegral.
  * For integer caps (the terminated-polynomial variants) the v contour is
    a residue at 0, extracted from a truncated Laurent expansion of the
    integrand: the binomial factor (1 - 1/v)^cap contributes the finite
    negative-power part and two Taylor factors the positive powers.
  * For the infinite variant the contour encodes a Gauss-series identity;
    it is consumed term-wise (coefficients (i+(l+alpha+lam)/2)_j
    (i+(l+beta+lam)/2)_j / (j!)^2), never discretized.

Because every level maps power i of its composite variable to powers
i + j of the next one, a whole sub-integral is evaluated by propagating
coefficient vectors level by level; the innermost vector is always the
Gauss hypergeometric series the expansion recurs on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, roots_jacobi

from .errors import (
    CapsNotMonotone,
    DegenerateA,
    DivergentIntegral,
    NoConvergence,
    NonIntegerCap,
    PoleAtC,
    UnsupportedDepth,
)
from .hyper2f1 import f21_coefficients
from .params import HeunParams, IndicialRoot, Normalization, RootKind
from .series3trf import Variant, _leading_factor, zeta_eta

__all__ = [
    "KernelEvalConfig",
    "OperatorWeights",
    "WChain",
    "beta_kernel_identity_check",
    "build_w_chain",
    "eval_subintegral_infinite_structural",
    "eval_subintegral_poly",
    "kernel_value_direct",
    "kernel_value_quadrature",
    "level0_2f1_params",
    "operator_weighted_2f1",
    "operator_weights",
    "w_chain_contraction_flags",
]

_A_GUARD = 1e-12
MAX_DEPTH_POLY = 3
MAX_DEPTH_INFINITE = 2


@dataclass(frozen=True)
class KernelEvalConfig:
    quad_order_t: int = 32
    quad_order_u: int = 32
    laurent_cap: int = 64
    tol: float = 1e-12

    def __post_init__(self) -> None:
        if self.quad_order_t < 8 or self.quad_order_u < 8:
            raise ValueError("quadrature orders must be >= 8")
        if self.laurent_cap < 1:
            raise ValueError("laurent_cap must be >= 1")


@dataclass(frozen=True)
class OperatorWeights:
    """Constants of the level operator (k + s)(k + omega) + q_weight,
    with s = (level - 1 + lam)/2."""

    lam: float
    omega: float
    q_weight: float
    level: int


@dataclass(frozen=True)
class WChain:
    """Composite variables (w_{n,n}, ..., w_{1,n}) at one node tuple."""

    level_values: tuple[complex, ...]


@lru_cache(maxsize=4096)
def _rule_01(order: int, exponent: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for integral_0^1 t^exponent f(t) dt, exponent > -1."""
    nodes, weights = roots_jacobi(order, 0.0, exponent)
    t = 0.5 * (nodes + 1.0)
    return t, weights * 0.5 ** (exponent + 1.0)


def _beta_by_quadrature(exponent: float, j: int, order: int) -> float:
    """integral_0^1 t^exponent (1-t)^j dt by an exponent-matched rule."""
    if exponent <= -1.0:
        raise DivergentIntegral(f"endpoint exponent {exponent} <= -1")
    t, w = _rule_01(order, exponent)
    return float(np.sum(w * (1.0 - t) ** j))


def beta_kernel_identity_check(
    i_prev: int,
    l: int,
    p: HeunParams,
    r: IndicialRoot,
    cfg: KernelEvalConfig,
    j: int = 0,
    axis: str = "t",
) -> tuple[float, float]:
    """Both sides of the Beta identity for one kernel integral.

    lhs: quadrature of the defining integral B(p_axis, j+1) with
    p_t = i_prev + (l+lam)/2 and p_u = i_prev + (l-1+gamma+lam)/2.
    rhs: the gamma-function ratio. Raises DivergentIntegral when the
    integrand exponent p_axis - 1 is at or below -1.
    """
    lam = r.lam
    if axis == "t":
        pa = i_prev + (l + lam) / 2.0
        order = cfg.quad_order_t
    elif axis == "u":
        pa = i_prev + (l - 1.0 + p.gamma + lam) / 2.0
        order = cfg.quad_order_u
    else:
        raise ValueError("axis must be 't' or 'u'")
    if pa <= 0.0:
        raise DivergentIntegral(f"Beta argument {pa} <= 0: integral diverges")
    lhs = _beta_by_quadrature(pa - 1.0, j, order)
    rhs = math.exp(gammaln(pa) + gammaln(j + 1.0) - gammaln(pa + j + 1.0))
    return lhs, rhs


def operator_weights(
    variant: Variant,
    p: HeunParams,
    lam: float,
    level: int,
    caps: tuple[int, ...] | None = None,
    beta_caps: tuple[int, ...] | None = None,
) -> OperatorWeights:
    """Operator constants at nesting level `level` (>= 1)."""
    if level < 1:
        raise ValueError("operator levels start at 1")
    two = 2.0 * (1.0 + p.a)
    k = level - 1

    def cap(seq, idx):
        return seq[min(idx, len(seq) - 1)]

    if variant is Variant.INFINITE:
        om = (p.alpha + p.beta - p.delta + k + lam + p.a * (p.delta + p.gamma + k - 1.0 + lam)) / two
    elif variant is Variant.POLY_S:
        om = (-2.0 * cap(caps, k) + p.beta - p.delta + p.a * (p.delta + p.gamma + k - 1.0 + lam)) / two
    else:
        om = (
            -2.0 * cap(caps, k)
            - 2.0 * cap(beta_caps, k)
            - p.delta
            - k
            - lam
            + p.a * (p.delta + p.gamma + k - 1.0 + lam)
        ) / two
    return OperatorWeights(lam=lam, omega=om, q_weight=p.q / (4.0 * (1.0 + p.a)), level=level)


def operator_weighted_2f1(
    w: float,
    weights: OperatorWeights,
    series_params: tuple[float, float, float],
    tol: float = 1e-14,
    max_terms: int = 10_000,
) -> float:
    """Apply the level operator to the Gauss series and evaluate at w.

    For f(w) = sum_k e_k w^k returns
    sum_k [(k + s)(k + omega) + q_weight] e_k w^k, s = (level-1+lam)/2.
    Requires |w| < 1 unless the series terminates.
    """
    a2, b2, c2 = series_params
    s = (weights.level - 1.0 + weights.lam) / 2.0
    terminating = any(v <= 0.0 and v == int(v) for v in (a2, b2))
    if not terminating and abs(w) >= 1.0:
        raise NoConvergence(f"|w| = {abs(w)} >= 1 for a non-terminating series")
    total = 0.0
    e = 1.0
    wk = 1.0
    small = 0
    for k in range(max_terms):
        total += ((k + s) * (k + weights.omega) + weights.q_weight) * e * wk
        denom = (c2 + k) * (k + 1.0)
        if denom == 0.0:
            raise PoleAtC(f"lower parameter {c2} hits its pole at k={k}")
        e *= (a2 + k) * (b2 + k) / denom
        if e == 0.0:
            return total
        wk *= w
        if abs(e * wk) <= tol * max(abs(total), 1e-300):
            small += 1
            if small >= 2:
                return total
        else:
            small = 0
    raise NoConvergence(f"operator series did not settle within {max_terms} terms")


def level0_2f1_params(
    variant: Variant,
    p: HeunParams,
    r: IndicialRoot,
    caps: tuple[int, ...] | None = None,
    beta_caps: tuple[int, ...] | None = None,
) -> tuple[float, float, float]:
    """Parameters (a, b, c) of the Gauss series every sub-integral recurs on.

    For the first-kind root: c = (1+gamma)/2; for the second kind the
    other lower parameter collapses to k! and c = 1 + lam/2 = (3-gamma)/2.
    """
    lam = r.lam
    if r.kind is RootKind.FIRST:
        c2 = 0.5 + p.gamma / 2.0
    else:
        c2 = 1.0 + lam / 2.0
    if variant is Variant.INFINITE:
        return (p.alpha + lam) / 2.0, (p.beta + lam) / 2.0, c2
    if variant is Variant.POLY_S:
        return -float(caps[0]), (p.beta + lam) / 2.0, c2
    return -float(caps[0]), -float(beta_caps[0]), c2


def _taylor_inv_one_minus(power: int, n_terms: int) -> np.ndarray:
    """Taylor coefficients of (1-v)^(-power) up to v^(n_terms-1)."""
    g = np.zeros(n_terms)
    g[0] = 1.0
    for rr in range(n_terms - 1):
        g[rr + 1] = g[rr] * (power + rr) / (rr + 1.0)
    return g


def _laurent_residue_coeffs(
    cap: int, i: int, taylor_b: float, jmax: int, laurent_cap: int
) -> np.ndarray:
    """Residue at v=0 of the level kernel, collected per transfer power j.

    The integrand (times its 1/v prefactor) is
      (1/v) (1-1/v)^cap * (v/(v-1))^i * (1 - X v)^(-(taylor_b + i))
    with X the (t,u)-damped next-level variable; the coefficient of X^j in
    its residue is returned for j = 0..jmax. The binomial factor gives the
    finite negative-power Laurent part, the other two factors are Taylor
    expanded and truncated at laurent_cap.
    """
    if cap < 0 or cap != int(cap):
        raise NonIntegerCap(f"contour residue needs an integer cap, got {cap}")
    if cap > laurent_cap:
        raise ValueError(f"laurent_cap {laurent_cap} < cap {cap}")
    # negative part: (1-1/v)^cap = sum_s binom(cap,s) (-1)^s v^(-s)
    neg = np.zeros(cap + 1)
    acc = 1.0
    for s in range(cap + 1):
        neg[s] = acc * (-1.0) ** s
        acc = acc * (cap - s) / (s + 1.0)
    # (v/(v-1))^i = (-1)^i v^i (1-v)^(-i); Taylor part of (1-v)^(-i):
    pos = _taylor_inv_one_minus(i, cap + 1)
    # (1 - X v)^(-(taylor_b+i)) pairs X-power j with v-power j
    out = np.zeros(jmax + 1)
    bpow = 1.0
    for j in range(jmax + 1):
        if j > 0:
            bpow = bpow * (taylor_b + i + j - 1.0) / j
        # residue: total v power -s + i + rr + j == 0
        tot = 0.0
        for s in range(i + j, cap + 1):
            rr = s - i - j
            if rr >= pos.size:
                continue
            tot += neg[s] * pos[rr]
        out[j] = (-1.0) ** i * bpow * tot
    return out


def _transfer_row_poly(
    level: int,
    i: int,
    cap_l: int,
    taylor_b: float,
    p: HeunParams,
    lam: float,
    cfg: KernelEvalConfig,
) -> np.ndarray:
    """Transfer coefficients power i -> powers i+j, j = 0..cap_l-i."""
    jmax = cap_l - i
    if jmax < 0:
        return np.zeros(0)
    rho = _laurent_residue_coeffs(cap_l, i, taylor_b, jmax, cfg.laurent_cap)
    pt = i + (level + lam) / 2.0 - 1.0
    pu = i + (level - 3.0 + p.gamma + lam) / 2.0
    if pt <= -1.0 or pu <= -1.0:
        raise DivergentIntegral(f"kernel exponents ({pt}, {pu}) reach -1 at level {level}")
    tt, wt = _rule_01(cfg.quad_order_t, pt)
    tu, wu = _rule_01(cfg.quad_order_u, pu)
    js = np.arange(jmax + 1)
    bt = ((1.0 - tt)[:, None] ** js[None, :] * wt[:, None]).sum(axis=0)
    bu = ((1.0 - tu)[:, None] ** js[None, :] * wu[:, None]).sum(axis=0)
    return rho * bt * bu


def _transfer_row_infinite(
    level: int,
    i: int,
    jmax: int,
    p: HeunParams,
    lam: float,
    cfg: KernelEvalConfig,
) -> np.ndarray:
    """Same mapping for the infinite variant: contour consumed as a series."""
    a2 = i + (level + p.alpha + lam) / 2.0
    b2 = i + (level + p.beta + lam) / 2.0
    rho = f21_coefficients(a2, b2, 1.0, jmax + 1)
    pt = i + (level + lam) / 2.0 - 1.0
    pu = i + (level - 3.0 + p.gamma + lam) / 2.0
    if pt <= -1.0 or pu <= -1.0:
        raise DivergentIntegral(f"kernel exponents ({pt}, {pu}) reach -1 at level {level}")
    tt, wt = _rule_01(cfg.quad_order_t, pt)
    tu, wu = _rule_01(cfg.quad_order_u, pu)
    js = np.arange(jmax + 1)
    bt = ((1.0 - tt)[:, None] ** js[None, :] * wt[:, None]).sum(axis=0)
    bu = ((1.0 - tu)[:, None] ** js[None, :] * wu[:, None]).sum(axis=0)
    return rho * bt * bu


def kernel_value_quadrature(
    level: int,
    i_prev: int,
    z: float,
    p: HeunParams,
    r: IndicialRoot,
    cfg: KernelEvalConfig,
    variant: Variant = Variant.POLY_S,
    cap_l: int | None = None,
    beta_cap_l: int | None = None,
    jmax: int | None = None,
) -> float:
    """One level kernel evaluated by quadrature + Laurent/series contour.

    Returns sum_j transfer(i_prev -> i_prev+j) z^(i_prev+j); the direct
    rising-factorial ladder sum (kernel_value_direct) is its oracle.
    """
    lam = r.lam
    if variant is Variant.POLY_S:
        row = _transfer_row_poly(level, i_prev, cap_l, (p.beta + level + lam) / 2.0, p, lam, cfg)
    elif variant is Variant.POLY_B:
        row = _transfer_row_poly(level, i_prev, cap_l, -float(beta_cap_l), p, lam, cfg)
    else:
        if jmax is None:
            raise ValueError("infinite kernel needs jmax")
        row = _transfer_row_infinite(level, i_prev, jmax, p, lam, cfg)
    return float(sum(row[j] * z ** (i_prev + j) for j in range(len(row))))


def kernel_value_direct(
    level: int,
    i_prev: int,
    z: float,
    p: HeunParams,
    r: IndicialRoot,
    variant: Variant = Variant.POLY_S,
    cap_l: int | None = None,
    beta_cap_l: int | None = None,
    jmax: int | None = None,
) -> float:
    """The same kernel as its defining rising-factorial ladder sum."""
    lam = r.lam
    pref = 1.0 / (
        (i_prev + (level + lam) / 2.0) * (i_prev + (level - 1.0 + p.gamma + lam) / 2.0)
    )
    top = cap_l if variant is not Variant.INFINITE else i_prev + jmax
    total = 0.0
    ratio = 1.0
    for il in range(i_prev, top + 1):
        total += ratio * z**il
        den = (1.0 + level / 2.0 + lam / 2.0 + il) * (
            0.5 + level / 2.0 + p.gamma / 2.0 + lam / 2.0 + il
        )
        if variant is Variant.POLY_S:
            num = (-cap_l + il) * (level / 2.0 + p.beta / 2.0 + lam / 2.0 + il)
        elif variant is Variant.POLY_B:
            num = (-cap_l + il) * (-beta_cap_l + il)
        else:
            num = (level / 2.0 + p.alpha / 2.0 + lam / 2.0 + il) * (
                level / 2.0 + p.beta / 2.0 + lam / 2.0 + il
            )
        ratio *= num / den
    return pref * total


def _innermost_vector(
    variant: Variant,
    p: HeunParams,
    r: IndicialRoot,
    size: int,
    caps: tuple[int, ...] | None,
    beta_caps: tuple[int, ...] | None,
) -> tuple[np.ndarray, tuple[float, float, float]]:
    """Coefficients of the recurring Gauss series, via its level-0 params."""
    a2, b2, c2 = level0_2f1_params(variant, p, r, caps, beta_caps)
    return f21_coefficients(a2, b2, c2, size), (a2, b2, c2)


def _validate_poly_caps(caps, beta_caps, variant):
    def check(seq, what):
        out = []
        for c in seq:
            if isinstance(c, bool) or c != int(c) or c < 0:
                raise NonIntegerCap(f"{what} entries must be nonnegative integers, got {c}")
            out.append(int(c))
        if any(x > y for x, y in zip(out, out[1:])):
            raise CapsNotMonotone(f"{what} {tuple(out)} decrease")
        return tuple(out)

    caps = check(caps, "caps")
    if variant is Variant.POLY_B:
        if beta_caps is None:
            raise ValueError("both-terminated variant needs beta_caps")
        beta_caps = check(beta_caps, "beta_caps")
    return caps, beta_caps


def _cap_at(caps: tuple[int, ...], level: int) -> int:
    return caps[min(level, len(caps) - 1)]


def eval_subintegral_poly(
    p: HeunParams,
    r: IndicialRoot,
    c0: Normalization,
    n: int,
    caps,
    x: float,
    cfg: KernelEvalConfig = KernelEvalConfig(),
    variant: Variant = Variant.POLY_S,
    beta_caps=None,
) -> float:
    """The n-th integral sub-term (the eta^n block), terminated variants.

    Coefficient vectors are propagated through the n levels from the
    innermost Gauss series outward; each level applies the operator
    weights, then the quadrature + residue transfer. Depth is capped at 3
    (cost grows with the transfer sizes and verification value saturates
    by n = 2).
    """
    if n < 0:
        raise ValueError("sub-term index must be nonnegative")
    if n > MAX_DEPTH_POLY:
        raise UnsupportedDepth(f"polynomial sub-integrals support n <= {MAX_DEPTH_POLY}")
    if abs(1.0 + p.a) <= _A_GUARD:
        raise DegenerateA("a too close to -1 for the nested-weight form")
    if variant not in (Variant.POLY_S, Variant.POLY_B):
        raise ValueError("use eval_subintegral_infinite_structural for the infinite variant")
    caps, beta_caps = _validate_poly_caps(caps, beta_caps, variant)
    lam = r.lam
    z, eta = zeta_eta(p, x)
    e, _ = _innermost_vector(variant, p, r, caps[0] + 1, caps, beta_caps)
    for level in range(1, n + 1):
        ow = operator_weights(variant, p, lam, level, caps, beta_caps)
        s = (level - 1.0 + lam) / 2.0
        cap_l = _cap_at(caps, level)
        taylor_b = (
            (p.beta + level + lam) / 2.0
            if variant is Variant.POLY_S
            else -float(_cap_at(beta_caps, level))
        )
        enew = np.zeros(cap_l + 1)
        for i in range(min(len(e), cap_l + 1)):
            wgt = ((i + s) * (i + ow.omega) + ow.q_weight) * e[i]
            if wgt == 0.0:
                continue
            row = _transfer_row_poly(level, i, cap_l, taylor_b, p, lam, cfg)
            enew[i : i + len(row)] += wgt * row
        e = enew
    value = float(sum(e[i] * z**i for i in range(len(e))))
    lead = c0.c0 * _leading_factor(x, lam)
    return lead * value * eta**n


def eval_subintegral_infinite_structural(
    p: HeunParams,
    r: IndicialRoot,
    c0: Normalization,
    n: int,
    x: float,
    I_max: int = 40,
    cfg: KernelEvalConfig = KernelEvalConfig(),
) -> float:
    """The n-th integral sub-term for the infinite variant (n <= 2).

    The contour at each level is replaced by the Gauss-series identity it
    encodes, consumed term-wise and truncated at I_max; the (t, u)
    integrals are quadrature as in the polynomial case.
    """
    if n < 0:
        raise ValueError("sub-term index must be nonnegative")
    if n > MAX_DEPTH_INFINITE:
        raise UnsupportedDepth(f"infinite sub-integrals support n <= {MAX_DEPTH_INFINITE}")
    if abs(1.0 + p.a) <= _A_GUARD:
        raise DegenerateA("a too close to -1 for the nested-weight form")
    lam = r.lam
    z, eta = zeta_eta(p, x)
    e, _ = _innermost_vector(Variant.INFINITE, p, r, I_max + 1, None, None)
    for level in range(1, n + 1):
        ow = operator_weights(Variant.INFINITE, p, lam, level)
        s = (level - 1.0 + lam) / 2.0
        enew = np.zeros(I_max + 1)
        for i in range(I_max + 1):
            wgt = ((i + s) * (i + ow.omega) + ow.q_weight) * e[i]
            if wgt == 0.0:
                continue
            row = _transfer_row_infinite(level, i, I_max - i, p, lam, cfg)
            enew[i:] += wgt * row
        e = enew
    value = float(sum(e[i] * z**i for i in range(len(e))))
    lead = c0.c0 * _leading_factor(x, lam)
    return lead * value * eta**n


def build_w_chain(z: complex, nodes: list[tuple[float, float, complex]]) -> WChain:
    """Composite variables for one node tuple (t_l, u_l, v_l), l = 1..n.

    w_{n+1,n} = z and
    w_{l,n} = v_l/(v_l - 1) * w_{l+1,n} t_l u_l / (1 - w_{l+1,n} v_l (1-t_l)(1-u_l)).
    Returned outermost first: (w_{n,n}, ..., w_{1,n}).
    """
    w = complex(z)
    out = []
    for t, u, v in reversed(nodes):
        w = v / (v - 1.0) * (w * t * u) / (1.0 - w * v * (1.0 - t) * (1.0 - u))
        out.append(w)
    return WChain(level_values=tuple(out))


def w_chain_contraction_flags(
    z: float,
    depth: int,
    n_nodes: int = 6,
    radius: float = 0.5,
) -> list[tuple[float, ...]]:
    """Node tuples where |w_{1,n}| >= |z| (empirically none for |z| <= 0.5).

    Samples a coarse grid of (t, u) in (0,1)^2 and v on a circle of the
    given radius around 0 at every level. Flags violations, never raises.
    """
    ts = np.linspace(0.1, 0.9, n_nodes)
    vs = radius * np.exp(2j * np.pi * np.arange(n_nodes) / n_nodes)
    flags: list[tuple[float, ...]] = []
    rng = np.random.default_rng(20240211)
    for _ in range(200):
        nodes = [
            (float(rng.choice(ts)), float(rng.choice(ts)), complex(rng.choice(vs)))
            for _ in range(depth)
        ]
        chain = build_w_chain(z, nodes)
        if abs(chain.level_values[-1]) >= abs(z) > 0.0:
            flags.append(tuple(float(abs(v)) for v in chain.level_values))
    return flags
