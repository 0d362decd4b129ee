import numpy as np
import pytest

from conftest import draw_params, enum_poly_value

from heunkit.errors import (
    CapsNotMonotone,
    DegenerateA,
    InconsistentParameterization,
    NegativeBase,
    NonIntegerCap,
)
from heunkit.hyper2f1 import gauss_2f1
from heunkit.params import (
    IndicialRoot,
    Normalization,
    RootKind,
    indicial_roots,
    make_params,
)
from heunkit.recurrence import build_series, coeff_A
from heunkit.series3trf import (
    Variant,
    build_3trf_infinite,
    build_3trf_poly_Bterm,
    coefficient_of_order,
    zeta_eta,
)

FIRST = IndicialRoot(RootKind.FIRST, 0.0)
ONE = Normalization(1.0)


def test_zeta_eta_values():
    p = make_params(2.0, 0, 1, 1, 1, 1)
    assert zeta_eta(p, 0.5) == (pytest.approx(-0.125), pytest.approx(0.75))
    pm = make_params(-1.0, 0, 1, 1, 1, 1)
    z, eta = zeta_eta(pm, 0.3)
    assert z == pytest.approx(0.09) and eta == 0.0
    assert zeta_eta(make_params(1, 0, 1, 1, 1, 1), 0.0) == (0.0, 0.0)


def test_coefficient_of_order_k0_and_k1():
    p = make_params(1.7, 0.8, 0.8, 1.3, 0.9, 1.1)
    assert coefficient_of_order(p, FIRST, ONE, 0) == 1.0
    got = coefficient_of_order(p, FIRST, ONE, 1)
    assert got == pytest.approx(coeff_A(p, FIRST, 0), rel=1e-14)


def test_reorganization_identity_random_draws(rng):
    # the central identity: reassembled coefficients == recurrence, k <= 12
    for _ in range(12):
        p, root = draw_params(rng, second_kind=bool(rng.integers(2)))
        series = build_series(p, root, ONE, 14)
        for k in range(13):
            got = coefficient_of_order(p, root, ONE, k)
            want = series.coeffs[k]
            assert abs(got - want) <= 1e-10 * max(abs(want), 1e-280), (p, root, k)


def test_infinite_m0_is_gauss_series(rng):
    # the zero-A block at lam=0 is exactly 2F1(alpha/2, beta/2; (1+gamma)/2; z)
    for _ in range(20):
        p, root = draw_params(rng)
        x = float(rng.uniform(-0.8, 0.8))
        z, _ = zeta_eta(p, x)
        if abs(z) > 0.5:
            continue
        got = build_3trf_infinite(p, FIRST, ONE, M=0, I_max=80, x=x, early_stop_tol=0).value
        want = gauss_2f1(p.alpha / 2, p.beta / 2, 0.5 + p.gamma / 2, z)
        assert got == pytest.approx(want, rel=1e-12)


def test_infinite_value_matches_recurrence_in_region():
    p = make_params(1.7, 0.8, 0.8, 1.3, 0.9, 1.1)
    s = build_series(p, FIRST, ONE, 400)
    for x in (-0.2, 0.1, 0.25, 0.4):
        got = build_3trf_infinite(p, FIRST, ONE, M=40, I_max=80, x=x).value
        want = sum(s.coeffs[n] * x**n for n in range(401))
        assert got == pytest.approx(want, rel=1e-11)


def test_infinite_at_zero_returns_c0():
    p = make_params(1.7, 0.8, 0.8, 1.3, 0.9, 1.1)
    assert build_3trf_infinite(p, FIRST, ONE, x=0.0).value == 1.0


def test_infinite_blocks_carry_x_parity():
    # block m is x^m times an even series: flipping x flips odd blocks only
    p = make_params(1.7, 0.8, 0.8, 1.3, 0.9, 1.1)
    plus = build_3trf_infinite(p, FIRST, ONE, M=6, I_max=60, x=0.3, early_stop_tol=0).partials
    minus = build_3trf_infinite(p, FIRST, ONE, M=6, I_max=60, x=-0.3, early_stop_tol=0).partials
    for m in range(7):
        assert minus[m] == pytest.approx((-1.0) ** m * plus[m], rel=1e-13, abs=1e-280)


def test_infinite_rejects_a_near_minus_one():
    p = make_params(-1.0 + 1e-13, 0.5, 1, 1, 0.9, 1)
    with pytest.raises(DegenerateA):
        build_3trf_infinite(p, FIRST, ONE, x=0.1)


def test_negative_x_with_noninteger_root_rejected():
    p = make_params(1.7, 0.8, 0.8, 1.3, 0.9, 1.1)
    _, second = indicial_roots(p)
    with pytest.raises(NegativeBase):
        build_3trf_infinite(p, second, Normalization(1.0), x=-0.2)


def _poly_params(caps, lam=0.0, beta=1.234):
    alpha = -2.0 * caps[0] - lam
    return make_params(1.7, 0.31, alpha, beta, 0.9, 1.1)


def test_poly_all_zero_caps_m0_is_one():
    p = _poly_params([0])
    got = build_3trf_poly_Bterm(p, FIRST, ONE, [0], x=0.37, M=0)
    assert got.value == 1.0


def test_poly_cap_one_block_is_terminating_gauss():
    # first block with cap 1: 1 - (beta/2) z / ((1+gamma)/2)
    p = _poly_params([1])
    x = 0.42
    z, _ = zeta_eta(p, x)
    got = build_3trf_poly_Bterm(p, FIRST, ONE, [1], x=x, M=0).value
    want = gauss_2f1(-1.0, p.beta / 2, 0.5 + p.gamma / 2, z)
    assert got == pytest.approx(want, rel=1e-14)
    assert want == pytest.approx(1 - (p.beta / 2) * z / (0.5 + p.gamma / 2), rel=1e-14)


@pytest.mark.parametrize("caps", [[0], [1], [2], [0, 1, 2], [1, 1, 2], [2, 2, 2]])
def test_poly_single_matches_enumeration_oracle(caps):
    p = _poly_params(caps)
    for x in (0.15, 0.3, -0.25):
        got = build_3trf_poly_Bterm(p, FIRST, ONE, caps, x=x, M=7, early_stop_tol=0).value
        want = enum_poly_value(p, 0.0, caps, x, M=7)
        assert got == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("caps,bcaps", [([0], [0]), ([1], [2]), ([0, 1], [1, 2]), ([2], [2])])
def test_poly_both_matches_enumeration_oracle(caps, bcaps):
    lam = 0.0
    p = make_params(
        1.7, 0.31, -2.0 * caps[0] - lam, -2.0 * bcaps[0] - lam, 0.9, 1.1
    )
    for x in (0.2, -0.3):
        got = build_3trf_poly_Bterm(
            p, FIRST, ONE, caps, x=x, variant=Variant.POLY_B, beta_caps=bcaps, M=7, early_stop_tol=0
        ).value
        want = enum_poly_value(p, 0.0, caps, x, M=7, beta_caps=bcaps)
        assert got == pytest.approx(want, rel=1e-12)


def test_poly_both_equals_single_with_substituted_beta():
    # the both-terminated family is the single-terminated one evaluated at
    # beta = -2*beta_k - k - lam per level; check block by block
    caps, bcaps = [1, 2], [2, 3]
    lam = 0.0
    p = make_params(1.7, 0.31, -2.0 * caps[0] - lam, -2.0 * bcaps[0] - lam, 0.9, 1.1)
    got = build_3trf_poly_Bterm(
        p, FIRST, ONE, caps, x=0.3, variant=Variant.POLY_B, beta_caps=bcaps, M=6, early_stop_tol=0
    )
    want = enum_poly_value(p, 0.0, caps, 0.3, M=6, beta_caps=bcaps)
    assert got.value == pytest.approx(want, rel=1e-12)


def test_poly_caps_must_be_monotone():
    p = _poly_params([2])
    with pytest.raises(CapsNotMonotone):
        build_3trf_poly_Bterm(p, FIRST, ONE, [2, 1], x=0.1)


def test_poly_caps_must_be_integers():
    p = _poly_params([1])
    with pytest.raises(NonIntegerCap):
        build_3trf_poly_Bterm(p, FIRST, ONE, [1.5], x=0.1)


def test_poly_alpha_anchor_checked():
    p = make_params(1.7, 0.31, -1.9, 1.234, 0.9, 1.1)
    with pytest.raises(InconsistentParameterization):
        build_3trf_poly_Bterm(p, FIRST, ONE, [1], x=0.1)


def test_poly_beta_caps_dominate_alpha_caps():
    lam = 0.0
    p = make_params(1.7, 0.31, -2.0, -4.0, 0.9, 1.1)
    with pytest.raises(InconsistentParameterization):
        build_3trf_poly_Bterm(
            p, FIRST, ONE, [1, 3], x=0.1, variant=Variant.POLY_B, beta_caps=[2, 2]
        )


def test_second_kind_identity(rng):
    for _ in range(6):
        p, root = draw_params(rng, second_kind=True)
        series = build_series(p, root, ONE, 12)
        for k in range(10):
            got = coefficient_of_order(p, root, ONE, k)
            assert got == pytest.approx(series.coeffs[k], rel=1e-10, abs=1e-280)
