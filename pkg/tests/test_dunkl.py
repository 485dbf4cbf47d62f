"""Dunkl operators, adjoints, angular operators and the Sturm-Liouville operator."""
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dunklball import MomentEngine, WeightParams, build_basis
from dunklball.dunkl import (dunkl, dunkl_angular, dunkl_gradient, dunkl_multi, dunkl_star, euler, h_laplacian,
                             sturm_liouville)
from dunklball.multipoly import Polynomial, random_polynomial, reflect, skew, sym

F = Fraction
W2 = WeightParams(F(1, 2), (F(1, 4), F(-1, 2)), "rational")
W3 = WeightParams(F(-1, 2), (F(1, 2), F(0), F(3, 2)), "rational")


def mono(a, c=1):
    return Polynomial.monomial(a, c, "rational")


def const(d, c):
    return Polynomial.constant(d, c, "rational")


# -- weight parameters ------------------------------------------------------------

def test_weight_scalars():
    w = WeightParams(F(1, 2), (F(1, 4), F(-1, 2)), "rational")
    assert w.d == 2 and w.lam == F(1, 2) + F(-1, 8) + 1
    assert w.K == 1
    assert w.M == 2 * abs(w.lam) * F(3, 4) + F(9, 16)
    neg = WeightParams(F(-9, 10), (F(-9, 10),), "rational")
    assert neg.lam == F(-17, 20) and neg.K == F(17, 10)
    for n in range(6):
        assert n * (n + 2 * neg.lam) + neg.K > 0


@pytest.mark.parametrize("alpha,gamma", [(-1, (0,)), (0, (-1, 0)), (0, ())])
def test_weight_validation(alpha, gamma):
    with pytest.raises(ValueError):
        WeightParams(alpha, gamma)


# -- examples -------------------------------------------------------------------------

def test_dunkl_examples():
    w = WeightParams(F(0), (F(1, 2), F(0)), "rational")
    assert dunkl(mono((1, 0)), 0, w) == const(2, F(3, 2))
    assert dunkl(mono((2, 0)), 0, W2) == mono((1, 0), 2)
    assert dunkl(mono((1, 0)), 1, W2).is_zero()


def test_dunkl_star_examples():
    for j in range(2):
        e = tuple(int(i == j) for i in range(2))
        assert dunkl_star(const(2, 1), j, W2) == mono(e, 2 * (W2.alpha + 1))
    w1 = WeightParams(F(0), (F(0),), "rational")
    assert dunkl_star(mono((1,)), 0, w1) == Polynomial(1, {(2,): 3, (0,): -1}, "rational")


def test_angular_examples():
    assert dunkl_angular(mono((1, 0)), 0, 1, W2) == mono((0, 1), -(1 + W2.gamma[0]))
    p = random_polynomial(2, 5, np.random.default_rng(0), "rational")
    assert dunkl_angular(p, 1, 1, W2).is_zero()
    assert dunkl_angular(p, 0, 1, W2) == dunkl_angular(p, 1, 0, W2).scale(-1)


def test_sturm_liouville_examples():
    assert sturm_liouville(const(2, 1), W2).is_zero()
    x1 = mono((1, 0))
    assert sturm_liouville(x1, W2) == x1.scale(1 + 2 * W2.lam)
    assert sturm_liouville(x1, W2, "product") == x1.scale(1 + 2 * W2.lam)


def test_sturm_liouville_on_degree_two_basis():
    w = WeightParams(0.5, (0.25, 0.0))
    b = build_basis(w, 2)
    eng = MomentEngine(w)
    for q in b.levels[2]:
        res = sturm_liouville(q, w) - q.scale(2 * (2 + 2 * w.lam))
        assert eng.norm2(res) <= 1e-24 * eng.norm2(q)


def test_gradient_examples():
    p = random_polynomial(2, 4, np.random.default_rng(1), "rational")
    assert dunkl_gradient(p, W2, 0) == [((0, 0), 1, p)]
    g1 = dunkl_gradient(p, W2, 1)
    assert [(b, m) for b, m, _ in g1] == [((1, 0), 1), ((0, 1), 1)]
    assert g1[0][2] == dunkl(p, 0, W2) and g1[1][2] == dunkl(p, 1, W2)
    g2 = dunkl_gradient(p, W2, 2)
    assert sorted(m for _, m, _ in g2) == [1, 1, 2]
    assert dunkl_multi(p, (1, 1), W2) == dunkl(dunkl(p, 0, W2), 1, W2)


def test_euler_and_h_laplacian():
    p = Polynomial(2, {(2, 1): 3, (1, 0): 1}, "rational")
    assert euler(p) == Polynomial(2, {(2, 1): 9, (1, 0): 1}, "rational")
    w0 = WeightParams(F(0), (F(0), F(0)), "rational")
    assert h_laplacian(mono((2, 2)), w0) == Polynomial(2, {(0, 2): 2, (2, 0): 2}, "rational")


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        dunkl(mono((1, 0, 0)), 0, W2)


# -- exact identities on random polynomials -----------------------------------------

cases = st.tuples(st.sampled_from([W2, W3]), st.integers(0, 8), st.integers(0, 2 ** 32 - 1))


def _rand(w, deg, seed):
    return random_polynomial(w.d, deg, np.random.default_rng(seed), "rational")


@settings(max_examples=40, deadline=None)
@given(cases)
def test_commutation_and_reflections(case):
    w, deg, seed = case
    p = _rand(w, deg, seed)
    d = w.d
    for i in range(d):
        for j in range(d):
            assert dunkl(dunkl(p, i, w), j, w) == dunkl(dunkl(p, j, w), i, w)
            lhs = dunkl(reflect(p, i), j, w)
            rhs = reflect(dunkl(p, j, w), i)
            assert lhs == (rhs.scale(-1) if i == j else rhs)


@settings(max_examples=40, deadline=None)
@given(cases)
def test_product_rule_and_parity_flips(case):
    w, deg, seed = case
    q = _rand(w, deg, seed)
    for j in range(w.d):
        e = tuple(int(i == j) for i in range(w.d))
        lhs = dunkl(q.mul_monomial(e), j, w)
        rhs = dunkl(q, j, w).mul_monomial(e) + q + reflect(q, j).scale(w.gamma[j])
        assert lhs == rhs
        assert dunkl(sym(q, j), j, w) == skew(dunkl(q, j, w), j)
        assert dunkl_star(sym(q, j), j, w) == skew(dunkl_star(q, j, w), j)


@settings(max_examples=25, deadline=None)
@given(cases)
def test_strong_and_product_forms_agree(case):
    w, deg, seed = case
    p = _rand(w, deg, seed)
    assert sturm_liouville(p, w, "strong") == sturm_liouville(p, w, "product")


def test_forms_agree_in_float():
    w = WeightParams(-0.5, (0.5, 0.0, 1.5))
    rng = np.random.default_rng(5)
    for _ in range(10):
        p = random_polynomial(3, 8, rng, "float")
        a, b = sturm_liouville(p, w, "strong"), sturm_liouville(p, w, "product")
        assert (a - b).max_abs_coefficient() <= 1e-12 * max(1.0, a.max_abs_coefficient())


def test_gamma_zero_reduction():
    w0 = WeightParams(F(1, 3), (F(0), F(0), F(0)), "rational")
    p = random_polynomial(3, 7, np.random.default_rng(2), "rational")
    for j in range(3):
        assert dunkl(p, j, w0) == p.diff(j)


def test_degree_drop():
    p = random_polynomial(2, 6, np.random.default_rng(3), "rational")
    for j in range(2):
        assert dunkl(p, j, W2).degree == p.degree - 1
        assert dunkl_star(p, j, W2).degree <= p.degree + 1
