"""Orthogonal polynomial bases on the ball, projectors, and Jacobi utilities.

The space of degree-``k`` orthogonal polynomials is built by Gram-Schmidt over
the monomials in graded-lex order.  The Gram matrix of monomials is block
diagonal by parity class (the vector ``a mod 2``), so each class is
orthogonalised on its own; every basis element therefore has a definite
parity under every coordinate reflection.

Rational bases keep the Gram-Schmidt output unnormalised (each element is its
leading monomial minus earlier terms) and carry exact squared norms.  Float
bases are orthonormal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from gmpy2 import mpq

from .moments import MomentEngine, _dot, _objmatvec
from .multipoly import Polynomial, monomials_upto, to_scalar
from .weights import WeightParams

FLOAT_PIVOT_TOL = 1e-13
TRUSTED_DEGREE = {"float": 16, "rational": 10}


class BasisRankError(ArithmeticError):
    """Gram-Schmidt lost rank; ``degree`` is the degree being built."""

    def __init__(self, degree: int, pivot: float):
        super().__init__(f"numerical rank deficiency at degree {degree} (relative pivot {pivot:.3e})")
        self.degree = degree
        self.pivot = pivot


# -- Jacobi polynomials --------------------------------------------------------

def _check_jacobi(a, b) -> None:
    if not (a > -1 and b > -1):
        raise ValueError(f"Jacobi parameters must exceed -1, got ({a}, {b})")


def jacobi_eval(n: int, a, b, x):
    """Evaluate ``P_n^{(a,b)}(x)`` by the three-term recurrence (vectorised over ``x``)."""
    _check_jacobi(a, b)
    a = float(a)
    b = float(b)
    x = np.asarray(x, dtype=float)
    p0 = np.ones_like(x)
    if n == 0:
        return p0
    p1 = ((a + b + 2) * x + (a - b)) / 2
    for k in range(2, n + 1):
        c = 2 * k + a + b
        a1 = 2 * k * (k + a + b) * (c - 2)
        a2 = (c - 1) * (c * (c - 2) * x + a * a - b * b)
        a3 = 2 * (k + a - 1) * (k + b - 1) * c
        p0, p1 = p1, (a2 * p1 - a3 * p0) / a1
    return p1


def jacobi_poly(n: int, a, b, kind: str = "float") -> Polynomial:
    """``P_n^{(a,b)}`` as a univariate :class:`Polynomial`, exact in the rational kind."""
    _check_jacobi(a, b)
    a = to_scalar(a, kind)
    b = to_scalar(b, kind)
    x = Polynomial.variable(1, 0, kind)
    p0 = Polynomial.constant(1, 1, kind)
    if n == 0:
        return p0
    half = to_scalar(mpq(1, 2), kind)
    p1 = x.scale((a + b + 2) * half) + (a - b) * half
    for k in range(2, n + 1):
        c = 2 * k + a + b
        a1 = 2 * k * (k + a + b) * (c - 2)
        lin = x.scale((c - 1) * c * (c - 2)) + (c - 1) * (a * a - b * b)
        a3 = 2 * (k + a - 1) * (k + b - 1) * c
        p0, p1 = p1, (lin * p1 - p0.scale(a3)).scale(1 / a1)
    return p1


def jacobi_norm(n: int, a, b) -> float:
    """``h_n = int_{-1}^{1} P_n^{(a,b)}(x)^2 (1-x)^a (1+x)^b dx``."""
    _check_jacobi(a, b)
    a = float(a)
    b = float(b)
    if n == 0:
        return math.exp((a + b + 1) * math.log(2) + math.lgamma(a + 1) + math.lgamma(b + 1)
                        - math.lgamma(a + b + 2))
    log_h = ((a + b + 1) * math.log(2) - math.log(2 * n + a + b + 1)
             + math.lgamma(n + a + 1) + math.lgamma(n + b + 1)
             - math.lgamma(n + 1) - math.lgamma(n + a + b + 1))
    return math.exp(log_h)


def radial_jacobi(n: int, a, b, dim: int, kind: str = "float") -> Polynomial:
    """``P_n^{(a,b)}(2|x|^2 - 1)`` as a ``dim``-variate polynomial."""
    t = Polynomial.norm_squared(dim, kind).scale(2) - 1
    return jacobi_poly(n, a, b, kind).compose_univariate(t)


# -- closed-form test functions -----------------------------------------------

@dataclass(frozen=True)
class AxisPower:
    """``coeff * |x_j|^theta``, or ``coeff * sign(x_j) |x_j|^theta`` when ``signed``."""

    axis: int
    theta: float
    signed: bool = False
    coeff: float = 1.0

    def __post_init__(self):
        if self.theta < 0:
            raise ValueError("theta must be non-negative")

    def _theta_vec(self, d: int, t: float) -> tuple:
        v = [0.0] * d
        v[self.axis] = t
        return tuple(v)

    def moment_vector(self, engine: MomentEngine, exps: Sequence, alpha_shift: int = 0) -> np.ndarray:
        """``<u, x^a>`` for each exponent ``a`` in ``exps``."""
        d = engine.w.d
        out = np.zeros(len(exps))
        for i, a in enumerate(exps):
            aj = a[self.axis]
            if self.signed != bool(aj % 2):
                continue
            b = list(a)
            t = self.theta
            if self.signed:
                b[self.axis] -= 1
                t += 1
            out[i] = self.coeff * engine.monomial_moment(b, self._theta_vec(d, t), alpha_shift)
        return out

    def norm2(self, engine: MomentEngine, alpha_shift: int = 0) -> float:
        d = engine.w.d
        return self.coeff ** 2 * float(
            engine.monomial_moment((0,) * d, self._theta_vec(d, 2 * self.theta), alpha_shift))

    def inner(self, engine: MomentEngine, other: Union["AxisPower", Polynomial]) -> float:
        if isinstance(other, Polynomial):
            exps = list(other.terms)
            vals = self.moment_vector(engine, exps)
            return float(sum(float(c) * v for c, v in zip(other.terms.values(), vals)))
        if other.axis != self.axis or other.signed != self.signed:
            if other.axis == self.axis:
                return 0.0
            raise NotImplementedError("products of powers on different axes are not supported")
        d = engine.w.d
        return self.coeff * other.coeff * float(
            engine.monomial_moment((0,) * d, self._theta_vec(d, self.theta + other.theta)))

    def dunkl(self, j: int, w: WeightParams) -> "AxisPower | None":
        """Dunkl derivative along ``j``; ``None`` stands for the zero function."""
        if j != self.axis:
            return None
        if self.theta == 0:
            if not self.signed:
                return None
            # D sign(x) = gamma * sign(x)/x in the difference part
            raise ValueError("Dunkl derivative of sign(x_j) is not square integrable")
        if self.signed:
            c = self.coeff * (self.theta + float(w.gamma[j]))
        else:
            c = self.coeff * self.theta
        return AxisPower(self.axis, self.theta - 1, not self.signed, c)

    def regularity(self, w: WeightParams) -> int:
        """Largest ``l`` with ``gamma_j + 2 (theta - l) > -1`` (finite l-th Dunkl derivative)."""
        g = float(w.gamma[self.axis])
        return max(0, math.ceil((g + 1) / 2 + self.theta) - 1)


@dataclass(frozen=True)
class RadialJacobi:
    """``sum_n c_n P_n^{(alpha, beta')}(2|x|^2 - 1)`` with ``beta' = sum(gamma)/2 + (d-2)/2``.

    Term ``n`` lies in the orthogonal space of degree ``2n``.
    """

    coeffs: tuple

    def to_polynomial(self, w: WeightParams) -> Polynomial:
        out = Polynomial.zero(w.d, w.kind)
        for n, c in enumerate(self.coeffs):
            if c:
                out = out + radial_jacobi(n, w.alpha, w.beta_prime, w.d, w.kind).scale(c)
        return out


TestFunction = Union[Polynomial, AxisPower, RadialJacobi]


# -- the basis ---------------------------------------------------------------------

@dataclass
class OrthoBasis:
    """Mutually orthogonal bases of each degree-``k`` orthogonal space, ``k <= max_degree``.

    ``levels[k]`` lists the elements of degree ``k`` and ``norms2[k]`` their
    squared norms under ``<., .>_{alpha+alpha_shift, gamma}``.
    """

    engine: MomentEngine
    max_degree: int
    alpha_shift: int
    monomials: list
    mats: list
    norms2: list
    _levels: list | None = field(default=None, repr=False)
    _gram: np.ndarray | None = field(default=None, repr=False)
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._index = {a: i for i, a in enumerate(self.monomials)}

    @property
    def w(self) -> WeightParams:
        return self.engine.w

    @property
    def kind(self) -> str:
        return self.engine.kind

    @property
    def levels(self) -> list[list[Polynomial]]:
        if self._levels is None:
            self._levels = [[self._row_poly(row) for row in mat] for mat in self.mats]
        return self._levels

    def _row_poly(self, row) -> Polynomial:
        if self.kind == "float":
            row = [float(v) for v in row]
        return Polynomial._raw(self.w.d, {a: c for a, c in zip(self.monomials, row) if c}, self.kind)

    def _vec_poly(self, vec) -> Polynomial:
        if self.kind == "float":
            vec = [float(v) for v in vec]
        return Polynomial._raw(self.w.d, {a: c for a, c in zip(self.monomials, vec) if c}, self.kind)

    # -- inner products against the monomial list ---------------------------
    def dual(self, u: TestFunction) -> np.ndarray:
        """``<u, x^a>`` for each basis monomial ``a``."""
        if isinstance(u, RadialJacobi):
            u = u.to_polynomial(self.w)
        if isinstance(u, AxisPower):
            if self.kind != "float":
                raise TypeError("fractional powers need a float basis")
            return u.moment_vector(self.engine, self.monomials, self.alpha_shift)
        if not isinstance(u, Polynomial):
            raise TypeError(f"unsupported test function {type(u).__name__}")
        if u.dim != self.w.d:
            raise ValueError("dimension mismatch")
        if u.kind != self.kind:
            raise TypeError(f"scalar kind mismatch: function {u.kind}, basis {self.kind}")
        if u.is_zero():
            zero = to_scalar(0, self.kind)
            return np.array([zero] * len(self.monomials), dtype=object if self.kind == "rational" else float)
        exps, coefs = u.arrays()
        idx = [self._index.get(a) for a in u.terms]
        if None in idx:
            g = self.engine.gram(self.monomials, exps, self.alpha_shift)
        else:
            g = self._full_gram()[:, idx]
        return g @ coefs if g.dtype != object else _objmatvec(g, coefs)

    def _full_gram(self) -> np.ndarray:
        if self._gram is None:
            self._gram = self.engine.gram(self.monomials, self.monomials, self.alpha_shift)
        return self._gram

    def _check_degree(self, k: int) -> None:
        if k > self.max_degree:
            raise IndexError(f"degree {k} exceeds basis cap {self.max_degree}")

    def inner_with_level(self, u: TestFunction, k: int, dual=None) -> np.ndarray:
        """``<u, e>`` for every element ``e`` of level ``k``."""
        self._check_degree(k)
        dual = self.dual(u) if dual is None else dual
        mat = self.mats[k]
        return mat @ dual if mat.dtype != object else _objmatvec(mat, dual)

    def project(self, u: TestFunction, k: int, dual=None) -> Polynomial:
        """Orthogonal projection of ``u`` onto the degree-``k`` orthogonal space (zero for ``k < 0``)."""
        if k < 0:
            return Polynomial.zero(self.w.d, self.kind)
        ip = self.inner_with_level(u, k, dual)
        coef = _divide(ip, self.norms2[k])
        return self._vec_poly(_combine(coef, self.mats[k]))

    def truncate(self, u: TestFunction, n: int) -> Polynomial:
        """``S_n u``: projection onto all polynomials of degree <= ``n``."""
        if n < 0:
            return Polynomial.zero(self.w.d, self.kind)
        self._check_degree(n)
        dual = self.dual(u)
        out = None
        for k in range(n + 1):
            coef = _divide(self.inner_with_level(u, k, dual), self.norms2[k])
            part = _combine(coef, self.mats[k])
            out = part if out is None else out + part
        return self._vec_poly(out)

    def component_norms2(self, u: TestFunction, upto: int | None = None) -> list:
        """``||proj_k u||^2`` for ``k = 0..upto``."""
        upto = self.max_degree if upto is None else upto
        self._check_degree(upto)
        dual = self.dual(u)
        out = []
        for k in range(upto + 1):
            ip = self.inner_with_level(u, k, dual)
            out.append(sum((x * x / n2 for x, n2 in zip(ip, self.norms2[k])), to_scalar(0, self.kind)))
        return out

    def astype(self, kind: str) -> "OrthoBasis":
        """Round an exact basis to floats (elements stay unnormalised)."""
        if kind == self.kind:
            return self
        if kind != "float":
            raise ValueError("only rational -> float conversion is supported")
        engine = MomentEngine(self.w.astype("float"), self.engine.normalization)
        mats = [np.array(m, dtype=float).reshape(m.shape) for m in self.mats]
        norms2 = [np.array(n, dtype=float) for n in self.norms2]
        return OrthoBasis(engine, self.max_degree, self.alpha_shift, self.monomials, mats, norms2)


def _divide(ip, n2):
    if getattr(ip, "dtype", None) == object or getattr(n2, "dtype", None) == object:
        return np.array([x / y for x, y in zip(ip, n2)], dtype=object)
    return ip / n2


def _combine(coef, mat):
    if mat.shape[0] == 0:
        return np.zeros(mat.shape[1], dtype=mat.dtype) if mat.dtype != object else \
            np.array([mpq(0)] * mat.shape[1], dtype=object)
    if mat.dtype == object or coef.dtype == object:
        out = np.array([mpq(0)] * mat.shape[1], dtype=object)
        for c, row in zip(coef, mat):
            if c:
                out = out + c * row
        return out
    return coef @ mat


def build_basis(w_or_engine: Union[WeightParams, MomentEngine], max_degree: int,
                alpha_shift: int = 0, exact: bool = False) -> OrthoBasis:
    """Gram-Schmidt basis of the orthogonal spaces of degree ``0..max_degree``.

    The scalar kind follows the weight.  Rational weights run exact
    Gram-Schmidt on the monomials.  Floats use a Lanczos-style start vector
    ``x_j * e`` (``e`` an orthonormal element one degree lower) followed by
    modified Gram-Schmidt with one reorthogonalisation pass; starting from
    raw monomials would lose most digits by degree 16 because the monomial
    Gram matrix is extremely ill conditioned.

    ``exact=True`` with a float weight runs the exact construction on the
    rational values of the float parameters and rounds the result once; it
    is slower but accurate to working precision at any degree.
    """
    if max_degree < 0:
        raise ValueError("max_degree must be non-negative")
    engine = w_or_engine if isinstance(w_or_engine, MomentEngine) else MomentEngine(w_or_engine)
    if exact and engine.kind == "float":
        rational = MomentEngine(engine.w.astype("rational"), engine.normalization)
        return build_basis(rational, max_degree, alpha_shift).astype("float")
    kind = engine.kind
    d = engine.w.d
    monomials = monomials_upto(d, max_degree)
    index = {a: i for i, a in enumerate(monomials)}
    n_mon = len(monomials)
    dtype = float if kind == "float" else object
    rows: list[list] = [[] for _ in range(max_degree + 1)]
    norms: list[list] = [[] for _ in range(max_degree + 1)]

    if kind == "float":
        _gram_schmidt_float(engine, monomials, index, alpha_shift, rows, norms)
    else:
        _gram_schmidt_exact(engine, monomials, index, alpha_shift, rows, norms)

    mats = []
    norms2 = []
    for k in range(max_degree + 1):
        # order each level by leading monomial in graded-lex order
        order = sorted(range(len(rows[k])), key=lambda i: rows[k][i][0])
        mats.append(np.array([rows[k][i][1] for i in order], dtype=dtype).reshape(len(order), n_mon))
        norms2.append(np.array([norms[k][i] for i in order], dtype=dtype))
    return OrthoBasis(engine, max_degree, alpha_shift, monomials, mats, norms2)


def _classes(monomials) -> dict:
    classes: dict = {}
    for a in monomials:
        classes.setdefault(tuple(e % 2 for e in a), []).append(a)
    return classes


def _gram_schmidt_exact(engine, monomials, index, alpha_shift, rows, norms) -> None:
    n_mon = len(monomials)
    for members in _classes(monomials).values():
        gram = engine.gram(members, members, alpha_shift)
        done: list[tuple] = []  # (vector, gram @ vector, norm2)
        for t, a in enumerate(members):
            v = _unit(len(members), t, "rational")
            for e, ge, n2 in done:
                c = _dot(v, ge) / n2
                if c:
                    v = v - c * e
            gv = _objmatvec(gram, v)
            n2 = _dot(v, gv)
            if n2 == 0:
                raise BasisRankError(sum(a), 0.0)
            done.append((v, gv, n2))
            full = np.array([mpq(0)] * n_mon, dtype=object)
            for m, c in zip(members, v):
                full[index[m]] = c
            rows[sum(a)].append((index[a], full))
            norms[sum(a)].append(n2)


def _gram_schmidt_float(engine, monomials, index, alpha_shift, rows, norms) -> None:
    d = engine.w.d
    n_mon = len(monomials)
    gram = engine.gram(monomials, monomials, alpha_shift).astype(float)
    parity = [tuple(e % 2 for e in a) for a in monomials]
    # shift[j][i] = position of x_j * x^{a_i}, or -1 when it leaves the degree range
    shift = []
    for j in range(d):
        sh = np.full(n_mon, -1, dtype=np.int64)
        for i, a in enumerate(monomials):
            b = list(a)
            b[j] += 1
            sh[i] = index.get(tuple(b), -1)
        shift.append(sh)
    by_lead: dict = {}
    done: dict = {}  # parity class -> list of (vector, gram @ vector)
    for i, a in enumerate(monomials):
        k = sum(a)
        if k == 0:
            v = np.zeros(n_mon)
            v[i] = 1.0
        else:
            j = next(t for t, e in enumerate(a) if e)
            prev = list(a)
            prev[j] -= 1
            src = by_lead[tuple(prev)]
            nz = np.nonzero(src)[0]
            v = np.zeros(n_mon)
            v[shift[j][nz]] = src[nz]
        start = math.sqrt(max(float(v @ gram @ v), 0.0))
        cls = done.setdefault(parity[i], [])
        for _ in range(2):
            for e, ge in cls:
                v = v - (v @ ge) * e
        gv = gram @ v
        n2 = float(v @ gv)
        pivot = math.sqrt(max(n2, 0.0)) / start if start > 0 else 0.0
        if not pivot > FLOAT_PIVOT_TOL:
            raise BasisRankError(k, pivot)
        s = math.sqrt(n2)
        v = v / s
        cls.append((v, gv / s))
        by_lead[a] = v
        rows[k].append((i, v))
        norms[k].append(1.0)


def _unit(n: int, t: int, kind: str) -> np.ndarray:
    if kind == "float":
        v = np.zeros(n)
        v[t] = 1.0
        return v
    v = np.array([mpq(0)] * n, dtype=object)
    v[t] = mpq(1)
    return v


def project_component(b: OrthoBasis, u: TestFunction, k: int) -> Polynomial:
    return b.project(u, k)


def truncate(b: OrthoBasis, u: TestFunction, n: int) -> Polynomial:
    return b.truncate(u, n)
