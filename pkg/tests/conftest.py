"""Shared helpers: parameter draws and the brute-force chain-enumeration
oracle the nested-sum evaluators are verified against."""

from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest

from heunkit.params import HeunParams, IndicialRoot, RootKind, indicial_roots, make_params
from heunkit.recurrence import coeff_A, coeff_B


def draw_params(rng: np.random.Generator, second_kind: bool = False):
    """Random valid (params, root): a in [-5,5] away from 0 and -1,
    exponent parameters in [-3,3] away from the integer pitfalls."""
    while True:
        a = float(rng.uniform(-5, 5))
        if abs(a) < 0.05 or abs(a + 1.0) < 2e-3:
            continue
        q = float(rng.uniform(-3, 3))
        alpha = float(rng.uniform(-3, 3))
        beta = float(rng.uniform(-3, 3))
        gamma = float(rng.uniform(-3, 3))
        delta = float(rng.uniform(-3, 3))
        if abs(gamma - round(gamma)) < 0.05:
            continue
        p = make_params(a, q, alpha, beta, gamma, delta)
        first, second = indicial_roots(p)
        root = second if second_kind else first
        if root.degenerate:
            continue
        return p, root


def cap_at(caps, level: int) -> int:
    return caps[min(level, len(caps) - 1)]


def enum_poly_value(
    p: HeunParams,
    lam: float,
    caps,
    x: float,
    M: int,
    beta_caps=None,
) -> float:
    """Brute-force oracle for the terminated nested sums.

    Enumerates every nondecreasing index chain i_0 <= ... <= i_m bounded
    by the caps and multiplies out actual recurrence coefficients: the
    (k+1)-th A-factor is A_{2 i_k + k} and the chain's B-segments use
    B_{k + 2r - 1}, both evaluated with the per-level effective exponent
    parameters alpha_k = -2 caps[k] - k - lam (and beta likewise when a
    second cap sequence is given). Shares no code with the nested-sum
    evaluator beyond coeff_A/coeff_B themselves.
    """
    kind = RootKind.FIRST if lam == 0.0 else RootKind.SECOND
    root = IndicialRoot(kind, lam)

    def level_params(k: int) -> HeunParams:
        al = -2.0 * cap_at(caps, k) - k - lam
        if beta_caps is None:
            return replace(p, alpha=al)
        return replace(p, alpha=al, beta=-2.0 * cap_at(beta_caps, k) - k - lam)

    total = 0.0

    def walk(level: int, lo: int, m: int, prod: float) -> None:
        nonlocal total
        pk = level_params(level)
        for i in range(lo, cap_at(caps, level) + 1):
            seg = prod
            for r in range(lo + 1, i + 1):
                seg *= coeff_B(pk, root, level + 2 * r - 1)
            if level == m:
                total += seg * x ** (m + 2 * i)
            else:
                walk(level + 1, i, m, seg * coeff_A(pk, root, 2 * i + level))

    for m in range(M + 1):
        walk(0, 0, m, 1.0)
    return total


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
