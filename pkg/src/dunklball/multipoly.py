"""Sparse multivariate polynomials over float64 or exact rationals.

A :class:`Polynomial` is an immutable map from exponent tuples to nonzero
coefficients.  Two scalar kinds are supported: ``"float"`` (Python floats)
and ``"rational"`` (``gmpy2.mpq``, exact and much faster than
:class:`fractions.Fraction`, which is still accepted as input).  Terms whose coefficient is
exactly zero are dropped on construction; there is no epsilon pruning.

Axes are 0-based throughout the library.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np
from gmpy2 import mpq

KINDS = ("float", "rational")
MPQ = type(mpq(0))


def is_rational_scalar(x) -> bool:
    return isinstance(x, (MPQ, Fraction))


def to_scalar(value, kind: str):
    """Convert ``value`` to the scalar type of ``kind``.

    Floats passed to the rational kind are read through their shortest repr,
    so ``0.1`` becomes ``1/10`` rather than its binary expansion.
    """
    if kind == "float":
        out = float(value)
        if not math.isfinite(out):
            raise ValueError(f"non-finite coefficient {value!r}")
        return out
    if kind == "rational":
        if isinstance(value, MPQ):
            return value
        if isinstance(value, Fraction):
            return mpq(value.numerator, value.denominator)
        if isinstance(value, Rational):
            return mpq(int(value.numerator), int(value.denominator))
        if isinstance(value, float):
            if not math.isfinite(value):
                raise ValueError(f"non-finite coefficient {value!r}")
            return mpq(repr(value))
        if isinstance(value, str):
            return mpq(Fraction(value.strip()))
        if isinstance(value, (np.integer,)):
            return mpq(int(value))
        if isinstance(value, np.floating):
            return to_scalar(float(value), kind)
        raise TypeError(f"cannot represent {value!r} as an exact rational")
    raise ValueError(f"unknown scalar kind {kind!r}; expected one of {KINDS}")


def grlex_key(a: Sequence[int]):
    """Sort key for graded-lex order: total degree first, then x1 before x2."""
    return (sum(a), tuple(-e for e in a))


def monomials_upto(dim: int, degree: int) -> list[tuple[int, ...]]:
    """All exponent tuples of total degree <= ``degree`` in graded-lex order."""
    out: list[tuple[int, ...]] = []
    for k in range(degree + 1):
        out.extend(monomials_of_degree(dim, k))
    return out


def monomials_of_degree(dim: int, k: int) -> list[tuple[int, ...]]:
    if dim == 1:
        return [(k,)]
    out = []
    for first in range(k, -1, -1):
        for rest in monomials_of_degree(dim - 1, k - first):
            out.append((first,) + rest)
    return out


class Polynomial:
    """Immutable sparse polynomial in ``dim`` variables.

    Parameters
    ----------
    dim : int
        Number of variables.
    terms : mapping or iterable of (exponents, coefficient)
        Repeated exponents are summed.
    kind : {"float", "rational"}
    """

    __slots__ = ("dim", "kind", "_terms", "_hash", "_arrays")

    def __init__(self, dim: int, terms=None, kind: str = "float"):
        if dim < 1:
            raise ValueError("dimension must be positive")
        if kind not in KINDS:
            raise ValueError(f"unknown scalar kind {kind!r}")
        self.dim = dim
        self.kind = kind
        acc: dict[tuple[int, ...], object] = {}
        if terms is not None:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for a, c in items:
                a = tuple(int(e) for e in a)
                if len(a) != dim:
                    raise ValueError(f"exponent {a} has length {len(a)}, expected {dim}")
                if any(e < 0 for e in a):
                    raise ValueError(f"negative exponent in {a}")
                c = to_scalar(c, kind)
                acc[a] = acc[a] + c if a in acc else c
        self._terms = {a: c for a, c in sorted(acc.items(), key=lambda t: grlex_key(t[0])) if c != 0}
        self._hash = None
        self._arrays = None

    @classmethod
    def _raw(cls, dim: int, terms: dict, kind: str) -> "Polynomial":
        # Trusted constructor: terms already have the right scalar type.
        p = cls.__new__(cls)
        p.dim = dim
        p.kind = kind
        p._terms = {a: terms[a] for a in sorted(terms, key=grlex_key) if terms[a] != 0}
        p._hash = None
        p._arrays = None
        return p

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, dim: int, kind: str = "float") -> "Polynomial":
        return cls._raw(dim, {}, kind)

    @classmethod
    def constant(cls, dim: int, c=1, kind: str = "float") -> "Polynomial":
        return cls(dim, {(0,) * dim: c}, kind)

    @classmethod
    def monomial(cls, a: Sequence[int], c=1, kind: str = "float") -> "Polynomial":
        return cls(len(a), {tuple(a): c}, kind)

    @classmethod
    def variable(cls, dim: int, j: int, kind: str = "float") -> "Polynomial":
        _check_axis(j, dim)
        a = [0] * dim
        a[j] = 1
        return cls(dim, {tuple(a): 1}, kind)

    @classmethod
    def norm_squared(cls, dim: int, kind: str = "float") -> "Polynomial":
        """The polynomial ``x_1^2 + ... + x_d^2``."""
        terms = {}
        for j in range(dim):
            a = [0] * dim
            a[j] = 2
            terms[tuple(a)] = 1
        return cls(dim, terms, kind)

    # -- basic protocol -----------------------------------------------------
    @property
    def terms(self) -> Mapping[tuple[int, ...], object]:
        return MappingProxyType(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def __getitem__(self, a) -> object:
        return self._terms.get(tuple(a), to_scalar(0, self.kind))

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(a) for a in self._terms), default=-1)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.dim == other.dim and self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dim, tuple(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        if not self._terms:
            return f"Polynomial(dim={self.dim}, 0)"
        parts = []
        for a, c in self._terms.items():
            mono = "*".join(f"x{i + 1}^{e}" if e > 1 else f"x{i + 1}" for i, e in enumerate(a) if e)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return f"Polynomial(dim={self.dim}, {' + '.join(parts)})"

    def astype(self, kind: str) -> "Polynomial":
        if kind == self.kind:
            return self
        return Polynomial(self.dim, self._terms, kind)

    def max_abs_coefficient(self) -> float:
        return max((abs(float(c)) for c in self._terms.values()), default=0.0)

    # -- arithmetic ---------------------------------------------------------
    def _check_compatible(self, other: "Polynomial") -> None:
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        if self.kind != other.kind:
            raise TypeError(f"scalar kind mismatch: {self.kind} vs {other.kind}")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            if np.isscalar(other) or is_rational_scalar(other):
                other = Polynomial.constant(self.dim, other, self.kind)
            else:
                return NotImplemented
        self._check_compatible(other)
        out = dict(self._terms)
        for a, c in other._terms.items():
            out[a] = out[a] + c if a in out else c
        return Polynomial._raw(self.dim, out, self.kind)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.dim, {a: -c for a, c in self._terms.items()}, self.kind)

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            if np.isscalar(other) or is_rational_scalar(other):
                other = Polynomial.constant(self.dim, other, self.kind)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Polynomial":
        c = to_scalar(c, self.kind)
        return Polynomial._raw(self.dim, {a: c * v for a, v in self._terms.items()}, self.kind)

    def mul_monomial(self, a: Sequence[int], c=1) -> "Polynomial":
        a = tuple(a)
        if len(a) != self.dim:
            raise ValueError(f"dimension mismatch: monomial has length {len(a)}")
        c = to_scalar(c, self.kind)
        out = {tuple(x + y for x, y in zip(b, a)): c * v for b, v in self._terms.items()}
        return Polynomial._raw(self.dim, out, self.kind)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            self._check_compatible(other)
            out: dict = {}
            for a, c in self._terms.items():
                for b, v in other._terms.items():
                    e = tuple(x + y for x, y in zip(a, b))
                    out[e] = out[e] + c * v if e in out else c * v
            return Polynomial._raw(self.dim, out, self.kind)
        if np.isscalar(other) or is_rational_scalar(other):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power")
        out = Polynomial.constant(self.dim, 1, self.kind)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- calculus and evaluation -------------------------------------------
    def diff(self, j: int) -> "Polynomial":
        _check_axis(j, self.dim)
        out = {}
        for a, c in self._terms.items():
            if a[j]:
                b = list(a)
                b[j] -= 1
                out[tuple(b)] = c * a[j]
        return Polynomial._raw(self.dim, out, self.kind)

    def __call__(self, x: Sequence) -> object:
        return self.evaluate(x)

    def evaluate(self, x: Sequence) -> object:
        """Evaluate at one point, summing terms in graded-lex order."""
        if len(x) != self.dim:
            raise ValueError(f"point has length {len(x)}, expected {self.dim}")
        total = to_scalar(0, self.kind) if self.kind == "rational" else 0.0
        for a, c in self._terms.items():
            term = c
            for xi, e in zip(x, a):
                if e:
                    term = term * xi**e
            total = total + term
        return total

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Exponents as an ``(n, d)`` int array and coefficients as a 1-D array.

        Rational polynomials give an object array of exact rationals.
        """
        if self._arrays is None:
            n = len(self._terms)
            exps = np.array(list(self._terms), dtype=np.int64).reshape(n, self.dim)
            dtype = float if self.kind == "float" else object
            coefs = np.array(list(self._terms.values()), dtype=dtype)
            self._arrays = (exps, coefs)
        return self._arrays

    def compose_univariate(self, inner: "Polynomial") -> "Polynomial":
        """Return ``self(inner)`` for a univariate ``self`` (Horner scheme)."""
        if self.dim != 1:
            raise ValueError("compose_univariate needs a univariate outer polynomial")
        if self.kind != inner.kind:
            raise TypeError("scalar kind mismatch")
        out = Polynomial.zero(inner.dim, inner.kind)
        for k in range(self.degree, -1, -1):
            out = out * inner + self[(k,)]
        return out

    # -- text serialization -------------------------------------------------
    def to_text(self) -> str:
        """One term per line: ``<coefficient> <a_1> ... <a_d>`` in graded-lex order."""
        lines = []
        for a, c in self._terms.items():
            cs = repr(float(c)) if self.kind == "float" else str(c)
            lines.append(" ".join([cs, *map(str, a)]))
        return "\n".join(lines)

    @classmethod
    def from_text(cls, text: str, dim: int | None = None, kind: str = "float") -> "Polynomial":
        terms = []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            if dim is None:
                dim = len(fields) - 1
            if len(fields) != dim + 1:
                raise ValueError(f"malformed term line {raw!r}")
            c = fields[0] if kind == "rational" else float(fields[0])
            terms.append((tuple(int(e) for e in fields[1:]), c))
        if dim is None:
            raise ValueError("cannot infer dimension of an empty polynomial")
        return cls(dim, terms, kind)


def _check_axis(j: int, dim: int) -> None:
    if not 0 <= j < dim:
        raise IndexError(f"axis {j} out of range for dimension {dim}")


# -- reflection-group operators ------------------------------------------------

def reflect(p: Polynomial, j: int) -> Polynomial:
    """``p o sigma_j``: flip the sign of every term odd in ``x_j``."""
    _check_axis(j, p.dim)
    return Polynomial._raw(p.dim, {a: (-c if a[j] % 2 else c) for a, c in p.items()}, p.kind)


def sym(p: Polynomial, j: int) -> Polynomial:
    """Part of ``p`` that is even under ``sigma_j``."""
    _check_axis(j, p.dim)
    return Polynomial._raw(p.dim, {a: c for a, c in p.items() if a[j] % 2 == 0}, p.kind)


def skew(p: Polynomial, j: int) -> Polynomial:
    """Part of ``p`` that is odd under ``sigma_j``."""
    _check_axis(j, p.dim)
    return Polynomial._raw(p.dim, {a: c for a, c in p.items() if a[j] % 2 == 1}, p.kind)


def sym_skew(p: Polynomial, j: int, which: str) -> Polynomial:
    if which == "sym":
        return sym(p, j)
    if which == "skew":
        return skew(p, j)
    raise ValueError(f"which must be 'sym' or 'skew', got {which!r}")


def rho(p: Polynomial, j: int) -> Polynomial:
    """Divided difference ``(p - p o sigma_j) / x_j = 2 Skew_j(p) / x_j``.

    Computed by shifting the ``x_j`` exponent of the odd terms down by one,
    so the division is exact.
    """
    _check_axis(j, p.dim)
    two = to_scalar(2, p.kind)
    out = {}
    for a, c in p.items():
        if a[j] % 2:
            b = list(a)
            b[j] -= 1
            out[tuple(b)] = two * c
    return Polynomial._raw(p.dim, out, p.kind)


def hadamard(p: Polynomial, k: int, axis: int | None = None) -> Polynomial:
    """Integral operator ``H_k(h)(x) = int_{-1}^{1} s^k h(x', s x_axis) ds``.

    On a monomial whose ``axis`` exponent is ``m`` this multiplies the
    coefficient by ``(1 - (-1)^(m+k+1)) / (m+k+1)``.  ``axis`` defaults to the
    last coordinate.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if axis is None:
        axis = p.dim - 1
    _check_axis(axis, p.dim)
    out = {}
    for a, c in p.items():
        e = a[axis] + k + 1
        if e % 2:
            out[a] = c * to_scalar(mpq(2, e), p.kind)
    return Polynomial._raw(p.dim, out, p.kind)


def partial_derivative(p: Polynomial, j: int) -> Polynomial:
    return p.diff(j)


def evaluate(p: Polynomial, x: Sequence) -> object:
    return p.evaluate(x)


def poly_arith(p: Polynomial, q: Polynomial | None, op: str, arg=None) -> Polynomial:
    """Dispatch for ``add``, ``sub``, ``scale`` (by ``arg``) and ``mul_monomial`` (by ``arg``)."""
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "scale":
        return p.scale(arg)
    if op == "mul_monomial":
        return p.mul_monomial(arg)
    raise ValueError(f"unknown op {op!r}")


def random_polynomial(
    dim: int,
    degree: int,
    rng: np.random.Generator,
    kind: str = "float",
    exponents: Iterable[tuple[int, ...]] | None = None,
) -> Polynomial:
    """Coefficients uniform in [-1, 1] on every monomial of degree <= ``degree``.

    In the rational kind the coefficients are multiples of 1/64 so that exact
    arithmetic stays cheap.
    """
    mons = list(exponents) if exponents is not None else monomials_upto(dim, degree)
    if kind == "rational":
        vals = rng.integers(-64, 65, size=len(mons))
        coefs = [mpq(int(v), 64) for v in vals]
    else:
        coefs = rng.uniform(-1.0, 1.0, size=len(mons)).tolist()
    return Polynomial(dim, zip(mons, coefs), kind)
