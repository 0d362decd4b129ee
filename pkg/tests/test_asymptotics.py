import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heunkit.asymptotics import (
    ABranch,
    classify_region,
    convergence_factor,
    geometric_tail,
    limit_coeffs,
    tail_large_a,
    tail_near_minus_one,
)
from heunkit.errors import OutsideRegion
from heunkit.params import make_params

SQRT2 = math.sqrt(2.0)


def P(a):
    return make_params(a, 0.5, 1.0, 1.0, 1.0, 1.0)


@pytest.mark.parametrize(
    "a,want",
    [(2.0, (1.5, -0.5)), (-1.0, (0.0, 1.0)), (1.0, (2.0, -1.0))],
)
def test_limit_coeffs(a, want):
    lim = limit_coeffs(P(a))
    assert (lim.a_inf, lim.b_inf) == want


def test_geometric_tail_values():
    assert geometric_tail(P(2.0), 0.5) == pytest.approx(1 / 0.375, rel=1e-15)
    assert geometric_tail(P(2.0), 0.0) == 1.0


def test_geometric_tail_boundary_excluded():
    with pytest.raises(OutsideRegion):
        geometric_tail(P(1.0), 1.0)


def test_tail_near_minus_one_values():
    assert tail_near_minus_one(P(-1.0), 0.0) == 1.0
    assert tail_near_minus_one(P(-1.0), 0.5) == pytest.approx(4.0 / 3.0, rel=1e-15)
    with pytest.raises(OutsideRegion):
        tail_near_minus_one(P(-1.0), 1.1)


def test_tail_large_a_values():
    assert tail_large_a(P(100.0), 0.0) == 1.0
    assert tail_large_a(P(100.0), 0.5) == pytest.approx(1 / 0.495, rel=1e-14)
    with pytest.raises(OutsideRegion):
        tail_large_a(P(100.0), 1.0)


def test_region_a_one():
    rep = classify_region(1.0, 0.5)
    assert rep.a_branch is ABranch.ONE
    (l1, h1), (l2, h2) = rep.intervals
    assert (l1, h1, l2, h2) == pytest.approx((1 - SQRT2, 1.0, 1.0, 1 + SQRT2), rel=1e-15)
    assert rep.contains_x


def test_region_a_zero_empty():
    rep = classify_region(0.0, 0.5)
    assert rep.a_branch is ABranch.ZERO
    assert rep.intervals == ()
    assert not rep.contains_x


def test_region_boundary_is_outside():
    assert not classify_region(1.0, 1.0).contains_x


def test_region_special_low_corrected():
    # the double-root row: (a, -1-sqrt2) u (-1-sqrt2, 1); membership must
    # agree with the raw inequality (x = -5 and x = 0.1 are both inside)
    a = -3.0 - 2.0 * SQRT2
    rep = classify_region(a, -5.0)
    assert rep.a_branch is ABranch.NEG_DOUBLE_ROOT_LOW
    (l1, h1), (l2, h2) = rep.intervals
    assert l1 == pytest.approx(a, rel=1e-15)
    assert h1 == pytest.approx(-1 - SQRT2, rel=1e-14)
    assert l2 == pytest.approx(-1 - SQRT2, rel=1e-14)
    assert h2 == 1.0
    assert rep.contains_x
    assert classify_region(a, 0.1).contains_x
    assert not classify_region(a, -1 - SQRT2).contains_x


def test_region_special_high():
    a = -3.0 + 2.0 * SQRT2
    rep = classify_region(a, 0.2)
    assert rep.a_branch is ABranch.NEG_DOUBLE_ROOT_HIGH
    (l1, h1), (l2, h2) = rep.intervals
    assert (l1, h2) == pytest.approx((a, 1.0), rel=1e-15)
    assert h1 == pytest.approx(-1 + SQRT2, rel=1e-14)


def test_region_rows_against_table_shapes():
    rep = classify_region(0.5, 0.2)
    assert rep.a_branch is ABranch.BETWEEN_ZERO_AND_ONE
    assert rep.intervals[0][1] == 0.5 and rep.intervals[1][0] == 1.0
    rep = classify_region(3.0, 0.2)
    assert rep.a_branch is ABranch.ABOVE_ONE
    assert rep.intervals[0][1] == 1.0 and rep.intervals[1][0] == 3.0
    rep = classify_region(-2.0, 0.2)
    assert rep.a_branch is ABranch.NEG_SINGLE_INTERVAL
    assert rep.intervals == ((-2.0, 1.0),)
    rep = classify_region(-6.0, 0.2)
    assert rep.a_branch is ABranch.NEG_SPLIT
    assert len(rep.intervals) == 2


def test_endpoints_satisfy_unit_factor():
    for a in (0.5, 1.0, 3.0, -0.11, -2.0, -6.0, -3 - 2 * SQRT2, -3 + 2 * SQRT2):
        rep = classify_region(a, 0.0)
        for lo, hi in rep.intervals:
            for e in (lo, hi):
                assert abs(abs(convergence_factor(a, e)) - 1.0) < 1e-12


@settings(deadline=None, max_examples=300)
@given(a=st.floats(-6, 6).filter(lambda v: v != 0.0), x=st.floats(-6, 6))
def test_membership_matches_raw_inequality(a, x):
    rep = classify_region(a, x)
    raw = abs(convergence_factor(a, x)) < 1.0
    assert rep.contains_x == raw
    # and the printed intervals themselves agree away from boundaries
    by_rows = any(lo < x < hi for lo, hi in rep.intervals)
    if abs(abs(convergence_factor(a, x)) - 1.0) > 1e-9:
        assert by_rows == raw


def test_frozen_model_partial_sums_converge_to_tail(rng):
    # recurrence with both coefficient streams frozen at their limits must
    # sum to the geometric closed form
    checked = 0
    while checked < 25:
        a = float(rng.uniform(-5, 5))
        if abs(a) < 0.3 or abs(a + 1) < 0.05:
            continue
        x = float(rng.uniform(-1.5, 1.5))
        zt = -x * x / a
        yt = (1 + a) / a * x
        if abs(zt + yt) > 0.7 or abs(zt) + abs(yt) > 0.85:
            continue
        A, B = (1 + a) / a, -1 / a
        c_prev, c = 1.0, A
        total = c_prev + c * x
        xp = x
        for _ in range(2, 201):
            c_prev, c = c, A * c + B * c_prev
            xp *= x
            total += c * xp
        want = geometric_tail(P(a), x)
        assert abs(total - want) / abs(want) < 1e-8
        checked += 1
