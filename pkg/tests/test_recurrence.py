import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heunkit.errors import (
    DegenerateSecondKind,
    NegativeBase,
    SingularDenominator,
    SingularPoint,
)
from heunkit.params import (
    IndicialRoot,
    Normalization,
    RootKind,
    indicial_roots,
    make_params,
)
from heunkit.recurrence import (
    SeriesSolution,
    build_series,
    coeff_A,
    coeff_B,
    eval_series,
    eval_series_derivs,
    ode_residual,
)

FIRST = IndicialRoot(RootKind.FIRST, 0.0)


def test_coeff_A_n0_closed_form():
    # n=0 kills the product term, leaving q/(a*gamma)
    p = make_params(2, 1, 0.3, 0.7, 1.0, 0.9)
    assert coeff_A(p, FIRST, 0) == pytest.approx(0.5, rel=1e-15)


def test_coeff_A_singular_denominator():
    p = make_params(2, 1, 1, 1, 0.0, 1)
    with pytest.raises(SingularDenominator) as exc:
        coeff_A(p, FIRST, 0)
    assert "gamma" in str(exc.value)


def test_coeff_B_example():
    p = make_params(1, 0, 1, 1, 1, 1)
    assert coeff_B(p, FIRST, 1) == pytest.approx(-0.25, rel=1e-15)


def test_coeff_B_beta_zero_terminates():
    p = make_params(1, 0, 2.0, 0.0, 1, 1)
    assert coeff_B(p, FIRST, 1) == 0.0


def test_coeff_B_termination_is_bitwise_zero():
    # alpha = -2*ai - i - lam makes the factor (n-1+lam+alpha) an exact zero
    for ai, i in [(0, 0), (1, 0), (2, 1), (1, 3)]:
        lam = 0.0
        alpha = -2.0 * ai - i - lam
        p = make_params(1.7, 0.3, alpha, 1.234, 0.9, 1.1)
        n_star = 2 * ai + i + 1
        assert coeff_B(p, FIRST, n_star) == 0.0


def test_build_series_one_step():
    p = make_params(2, 1, 0.3, 0.7, 1.0, 0.9)
    s = build_series(p, FIRST, Normalization(1.0), 1)
    assert s.coeffs.tolist() == [1.0, coeff_A(p, FIRST, 0)]


def test_build_series_rejects_degenerate_second_kind():
    p = make_params(2, 1, 1, 1, 3.0, 1)
    _, second = indicial_roots(p)
    with pytest.raises(DegenerateSecondKind):
        build_series(p, second, Normalization(1.0), 10)


@settings(deadline=None, max_examples=40)
@given(
    a=st.floats(0.3, 5).filter(lambda v: abs(v + 1) > 0.01),
    q=st.floats(-3, 3),
    alpha=st.floats(-3, 3),
    beta=st.floats(-3, 3),
    gamma=st.floats(0.2, 3),
    delta=st.floats(-3, 3),
)
def test_recurrence_fidelity(a, q, alpha, beta, gamma, delta):
    p = make_params(a, q, alpha, beta, gamma, delta)
    s = build_series(p, FIRST, Normalization(1.0), 200)
    c = s.coeffs
    for n in range(1, 199):
        want = coeff_A(p, FIRST, n) * c[n] + coeff_B(p, FIRST, n) * c[n - 1]
        scale = max(abs(c[n + 1]), abs(want), 1e-290)
        assert abs(c[n + 1] - want) <= 1e-13 * scale


def test_limit_consistency_at_huge_n():
    p = make_params(2.4, 1.3, 0.6, -0.8, 1.7, 0.5)
    n = 10**6
    assert abs(coeff_A(p, FIRST, n) / ((1 + p.a) / p.a) - 1.0) < 1e-5
    assert abs(coeff_B(p, FIRST, n) / (-1.0 / p.a) - 1.0) < 1e-5


def test_eval_series_at_zero_first_kind():
    p = make_params(2, 1, 1, 1, 1, 1)
    s = build_series(p, FIRST, Normalization(1.0), 5)
    assert eval_series(s, 0.0).value == 1.0


def test_eval_series_two_terms():
    s = SeriesSolution(FIRST, 1.0, np.array([1.0, 0.5]), 1)
    ev = eval_series(s, 0.1)
    assert ev.value == pytest.approx(1.05, rel=1e-15)
    assert ev.tail == pytest.approx(0.05, rel=1e-15)


def test_eval_series_negative_base():
    half = IndicialRoot(RootKind.SECOND, 0.5)
    s = SeriesSolution(half, 1.0, np.array([1.0, 0.5]), 1)
    with pytest.raises(NegativeBase):
        eval_series(s, -0.2)


def _exact_degree_one_polynomial():
    """alpha = -1 forces B_2 = 0, and this q solves c_2 = 0 exactly (every
    intermediate is a dyadic rational), so the series is the exact
    polynomial 1 - x/2 with a bitwise-zero tail."""
    return make_params(2.0, -0.5, -1.0, 1.5, 0.5, 1.0)


def test_exact_polynomial_truncates_and_solves():
    p = _exact_degree_one_polynomial()
    s = build_series(p, FIRST, Normalization(1.0), 30)
    assert np.all(s.coeffs[2:] == 0.0)
    for x in (0.3, 0.7, 1.5):
        assert ode_residual(p, s, x) < 5e-15


def test_residual_shrinks_with_truncation_order():
    p = make_params(2.0, 0.7, 0.4, 1.3, 0.9, 1.1)
    x = 0.2
    res = []
    for n in (20, 60, 120):
        s = build_series(p, FIRST, Normalization(1.0), n)
        res.append(ode_residual(p, s, x))
    assert res[0] > res[1] >= res[2]
    assert res[2] < 1e-10


def test_residual_singular_point():
    p = make_params(2, 1, 1, 1, 1, 1)
    s = build_series(p, FIRST, Normalization(1.0), 10)
    for bad in (0.0, 1.0, 2.0):
        with pytest.raises(SingularPoint):
            ode_residual(p, s, bad)


def test_residual_finite_difference_cross_check():
    p = _exact_degree_one_polynomial()
    s = build_series(p, FIRST, Normalization(1.0), 30)
    assert ode_residual(p, s, 0.4, h=1e-5) < 1e-5


def test_eval_series_derivs_match_difference_quotient():
    p = make_params(2.0, 0.7, 0.4, 1.3, 0.9, 1.1)
    s = build_series(p, FIRST, Normalization(1.0), 150)
    x, h = 0.2, 1e-6
    y, y1, y2 = eval_series_derivs(s, x)
    yp, ym = eval_series(s, x + h).value, eval_series(s, x - h).value
    assert y == pytest.approx(eval_series(s, x).value, rel=1e-14)
    assert y1 == pytest.approx((yp - ym) / (2 * h), rel=1e-8)
    assert y2 == pytest.approx((yp - 2 * y + ym) / (h * h), rel=1e-3)
