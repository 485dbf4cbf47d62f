"""Sparse polynomial arithmetic, reflections, parity parts, rho and H_k."""
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dunklball.multipoly import (Polynomial, evaluate, hadamard, monomials_of_degree, monomials_upto,
                                 partial_derivative, poly_arith, random_polynomial, reflect, rho, skew, sym,
                                 sym_skew)


def mono(a, c=1, kind="rational"):
    return Polynomial.monomial(a, c, kind)


def poly(dim, terms, kind="rational"):
    return Polynomial(dim, terms, kind)


# -- arithmetic ------------------------------------------------------------------

def test_cancellation_gives_canonical_zero():
    x1 = mono((1, 0))
    z = poly_arith(x1, x1.scale(-1), "add")
    assert z.is_zero() and z.degree == -1 and z == Polynomial.zero(2, "rational")


def test_mul_monomial_and_scale():
    one = Polynomial.constant(2, 1, "rational")
    assert poly_arith(one, None, "mul_monomial", (2, 0)) == mono((2, 0))
    p = poly(2, {(1, 0): 1, (0, 1): 1})
    assert poly_arith(p, None, "scale", 2) == poly(2, {(1, 0): 2, (0, 1): 2})


def test_degree_of_mul_monomial():
    p = poly(3, {(1, 0, 2): 3, (0, 0, 1): -1})
    assert p.mul_monomial((2, 1, 0)).degree == p.degree + 3


@pytest.mark.parametrize("kind", ["float", "rational"])
def test_mismatches_raise(kind):
    p = Polynomial.variable(2, 0, kind)
    with pytest.raises(ValueError):
        p + Polynomial.variable(3, 0, kind)
    other = "rational" if kind == "float" else "float"
    with pytest.raises(TypeError):
        p + Polynomial.variable(2, 0, other)
    with pytest.raises(ValueError):
        poly_arith(p, p, "divide")


def test_canonical_form_drops_exact_zeros_only():
    p = Polynomial(1, {(1,): 1e-300, (2,): 0.0}, "float")
    assert dict(p.terms) == {(1,): 1e-300}


def test_grlex_ordering_and_counts():
    mons = monomials_upto(2, 2)
    assert mons == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert len(monomials_of_degree(3, 4)) == 15


# -- reflections and parity -----------------------------------------------------

@pytest.mark.parametrize("p,j,want", [
    (mono((1, 0)), 0, mono((1, 0), -1)),
    (mono((2, 1)), 0, mono((2, 1))),
    (mono((1, 1)), 1, mono((1, 1), -1)),
])
def test_reflect_examples(p, j, want):
    assert reflect(p, j) == want


def test_sym_skew_examples():
    p = poly(1, {(1,): 1, (2,): 1})
    assert sym_skew(p, 0, "sym") == mono((2,))
    assert sym_skew(p, 0, "skew") == mono((1,))
    assert sym_skew(Polynomial.constant(2, 7, "rational"), 1, "skew").is_zero()


@pytest.mark.parametrize("fn", [reflect, sym, skew, rho])
def test_axis_out_of_range(fn):
    with pytest.raises(IndexError):
        fn(mono((1, 0)), 2)


def test_rho_examples():
    assert rho(mono((1,)), 0) == Polynomial.constant(1, 2, "rational")
    assert rho(mono((2,)), 0).is_zero()
    assert rho(mono((3,)), 0) == mono((2,), 2)


@pytest.mark.parametrize("m,want", [(0, Fraction(2)), (1, Fraction(0)), (2, Fraction(2, 3))])
def test_hadamard_h0_examples(m, want):
    out = hadamard(mono((0, m)), 0)
    assert out == mono((0, m), want) if want else out.is_zero()


def test_hadamard_axis_parameter():
    assert hadamard(mono((2, 0)), 0, axis=0) == mono((2, 0), Fraction(2, 3))
    with pytest.raises(ValueError):
        hadamard(mono((2, 0)), -1)
    with pytest.raises(IndexError):
        hadamard(mono((2, 0)), 0, axis=5)


def test_derivative_and_eval_examples():
    assert partial_derivative(mono((2, 1)), 0) == mono((1, 1), 2)
    assert partial_derivative(mono((1, 0)), 1).is_zero()
    p = poly(2, {(2, 0): 1, (0, 1): 1}, "float")
    assert evaluate(p, (1.0, 0.5)) == 1.5
    with pytest.raises(ValueError):
        evaluate(p, (1.0,))


# -- randomized properties ----------------------------------------------------

draws = st.tuples(st.integers(1, 3), st.integers(0, 8), st.integers(0, 2 ** 32 - 1))


def _rand(spec, kind="rational"):
    d, deg, seed = spec
    return random_polynomial(d, deg, np.random.default_rng(seed), kind)


@settings(max_examples=100, deadline=None)
@given(draws)
def test_reflection_sym_skew_rho_properties(spec):
    p = _rand(spec)
    for j in range(p.dim):
        assert reflect(reflect(p, j), j) == p
        s, k = sym(p, j), skew(p, j)
        assert s + k == p
        assert sym(s, j) == s and skew(k, j) == k and sym(k, j).is_zero()
        r = rho(p, j)
        e = tuple(int(i == j) for i in range(p.dim))
        assert r.mul_monomial(e) == k.scale(2)
        if not k.is_zero():
            assert r.degree <= p.degree - 1


@settings(max_examples=50, deadline=None)
@given(draws)
def test_four_way_parity_decomposition(spec):
    p = _rand(spec)
    if p.dim < 2:
        return
    parts = [f(g(p, 0), 1) for f in (sym, skew) for g in (sym, skew)]
    assert sum(parts[1:], parts[0]) == p
    assert sym(skew(p, 0), 1) == skew(sym(p, 1), 0)


@settings(max_examples=30, deadline=None)
@given(draws)
def test_reflect_is_linear(spec):
    p = _rand(spec)
    q = _rand((spec[0], spec[1], spec[2] ^ 1))
    for j in range(p.dim):
        assert reflect(p.scale(3) - q, j) == reflect(p, j).scale(3) - reflect(q, j)


@settings(max_examples=30, deadline=None)
@given(draws)
def test_hadamard_h0_of_derivative_is_rho_on_last_axis(spec):
    p = _rand(spec)
    j = p.dim - 1
    assert hadamard(partial_derivative(p, j), 0) == rho(p, j)


@pytest.mark.parametrize("kind", ["float", "rational"])
def test_text_round_trip(kind):
    p = random_polynomial(3, 5, np.random.default_rng(4), kind)
    q = Polynomial.from_text(p.to_text(), 3, kind)
    assert q == p
    first = p.to_text().splitlines()[0].split()
    assert len(first) == 4


def test_float_evaluation_is_deterministic():
    p = random_polynomial(3, 8, np.random.default_rng(9), "float")
    x = (0.3, -0.2, 0.7)
    assert evaluate(p, x) == evaluate(p, x)
    assert evaluate(p, x) == pytest.approx(sum(c * np.prod(np.power(x, a)) for a, c in p.terms.items()))
