"""Dunkl operators for the reflection group Z_2^d acting on polynomials.

All operators are linear maps ``Polynomial -> Polynomial`` parametrised by a
:class:`~dunklball.weights.WeightParams`.  They preserve the scalar kind, so
with rational weights every identity between them can be checked exactly.
"""
from __future__ import annotations

from itertools import combinations
from math import factorial

from .multipoly import Polynomial, monomials_of_degree, rho, skew
from .weights import WeightParams

__all__ = [
    "WeightParams",
    "dunkl",
    "dunkl_star",
    "dunkl_angular",
    "dunkl_multi",
    "dunkl_gradient",
    "h_laplacian",
    "euler",
    "sturm_liouville",
]


def _check(p: Polynomial, w: WeightParams) -> None:
    if p.dim != w.d:
        raise ValueError(f"dimension mismatch: polynomial has {p.dim}, weight has {w.d}")
    if p.kind != w.kind:
        raise TypeError(f"scalar kind mismatch: polynomial {p.kind}, weight {w.kind}")


def dunkl(p: Polynomial, j: int, w: WeightParams) -> Polynomial:
    """``D_j p = d_j p + (gamma_j / 2) rho_j(p)``."""
    _check(p, w)
    g = w.gamma[j] / 2
    return p.diff(j) + rho(p, j).scale(g)


def dunkl_star(p: Polynomial, j: int, w: WeightParams) -> Polynomial:
    """Formal adjoint of :func:`dunkl` from weight ``alpha + 1`` to ``alpha``.

    ``D*_j p = -(1 - |x|^2) D_j p + 2 (alpha + 1) x_j p``.
    """
    _check(p, w)
    one_minus_r2 = 1 - Polynomial.norm_squared(p.dim, p.kind)
    e = [0] * p.dim
    e[j] = 1
    return -(one_minus_r2 * dunkl(p, j, w)) + p.mul_monomial(e, 2 * (w.alpha + 1))


def dunkl_angular(p: Polynomial, i: int, j: int, w: WeightParams) -> Polynomial:
    """``D_{i,j} p = x_i D_j p - x_j D_i p`` (zero when ``i == j``)."""
    _check(p, w)
    if i == j:
        return Polynomial.zero(p.dim, p.kind)
    ei = [0] * p.dim
    ej = [0] * p.dim
    ei[i] = 1
    ej[j] = 1
    return dunkl(p, j, w).mul_monomial(ei) - dunkl(p, i, w).mul_monomial(ej)


def dunkl_multi(p: Polynomial, b, w: WeightParams) -> Polynomial:
    """``D_b p = D_1^{b_1} ... D_d^{b_d} p`` (the factors commute)."""
    out = p
    for j in reversed(range(len(b))):
        for _ in range(b[j]):
            out = dunkl(out, j, w)
    return out


def multinomial(b) -> int:
    out = factorial(sum(b))
    for e in b:
        out //= factorial(e)
    return out


def dunkl_gradient(p: Polynomial, w: WeightParams, k: int):
    """Distinct entries of the ``k``-fold Dunkl gradient.

    Returns a list of ``(b, multiplicity, D_b p)`` over multi-indices ``|b| = k``;
    the multiplicity counts how often ``D_b p`` appears in the full tensor.
    """
    if k < 0:
        raise ValueError("order must be non-negative")
    _check(p, w)
    out = []
    if k == 0:
        return [((0,) * p.dim, 1, p)]
    # walk b in graded-lex order, reusing lower-order results
    cache = {(0,) * p.dim: p}
    for b in monomials_of_degree(p.dim, k):
        out.append((b, multinomial(b), _dunkl_cached(b, w, cache)))
    return out


def _dunkl_cached(b, w, cache):
    if b in cache:
        return cache[b]
    j = next(i for i, e in enumerate(b) if e)
    prev = list(b)
    prev[j] -= 1
    val = dunkl(_dunkl_cached(tuple(prev), w, cache), j, w)
    cache[b] = val
    return val


def h_laplacian(p: Polynomial, w: WeightParams) -> Polynomial:
    """``Delta_h = sum_i D_i^2``."""
    _check(p, w)
    out = Polynomial.zero(p.dim, p.kind)
    for i in range(p.dim):
        out = out + dunkl(dunkl(p, i, w), i, w)
    return out


def euler(p: Polynomial) -> Polynomial:
    """``x . grad``: multiplies each monomial by its total degree."""
    return Polynomial._raw(p.dim, {a: c * sum(a) for a, c in p.items()}, p.kind)


def sturm_liouville(p: Polynomial, w: WeightParams, form: str = "strong") -> Polynomial:
    """Differential-difference operator with eigenvalue ``n(n + 2 lam)`` on degree-n orthogonal polynomials.

    ``form="strong"`` evaluates ``-Delta_h + (x.grad)^2 + 2 lam x.grad``.
    ``form="product"`` evaluates the adjoint-product expression
    ``sum_i D*_i D_i - sum_{i<j} D_{i,j}^2 - 2 lam sum_i gamma_i Skew_i
    + sum_{i,j} gamma_i gamma_j Skew_i Skew_j``.
    """
    _check(p, w)
    if form == "strong":
        e = euler(p)
        return -h_laplacian(p, w) + euler(e) + e.scale(2 * w.lam)
    if form == "product":
        out = Polynomial.zero(p.dim, p.kind)
        for i in range(p.dim):
            out = out + dunkl_star(dunkl(p, i, w), i, w)
        for i, j in combinations(range(p.dim), 2):
            out = out - dunkl_angular(dunkl_angular(p, i, j, w), i, j, w)
        for i in range(p.dim):
            out = out - skew(p, i).scale(2 * w.lam * w.gamma[i])
        for i in range(p.dim):
            si = skew(p, i)
            for j in range(p.dim):
                out = out + skew(si, j).scale(w.gamma[i] * w.gamma[j])
        return out
    raise ValueError(f"form must be 'strong' or 'product', got {form!r}")
