"""Exact weighted integration of polynomials on the unit ball.

Moments are taken against ``W_{alpha+s,gamma}`` and, by default, divided by
the mass of ``W_{alpha,gamma}`` ("unit" normalization), which keeps every
inner product rational when the parameters are rational.  For an even
exponent ``2b``::

    m_s(2b) = prod_i ((gamma_i+1)/2)_{b_i} * (alpha+1)_s / (lam+1)_{s+|b|}

with ``(z)_n`` the rising factorial; odd exponents integrate to zero.
Fractional per-axis shifts ``theta`` (for ``|x_j|^theta`` test functions)
replace the integer rising factorials by Gamma ratios and are float-only.
"""
from __future__ import annotations

import math
import operator
import threading
from itertools import combinations

import numpy as np
from gmpy2 import mpq
from scipy.special import poch

from .dunkl import dunkl, dunkl_angular, dunkl_gradient
from .multipoly import Polynomial, skew, to_scalar
from .weights import WeightParams

NORMALIZATIONS = ("unit", "absolute")


def log_mass(w: WeightParams, alpha_shift: int = 0) -> float:
    """Log of the integral of ``W_{alpha+s,gamma}`` over the ball."""
    alpha = float(w.alpha) + alpha_shift
    lam = float(w.lam) + alpha_shift
    out = sum(math.lgamma((float(g) + 1) / 2) for g in w.gamma)
    return out + math.lgamma(alpha + 1) - math.lgamma(lam + 1)


class MomentEngine:
    """Moments and inner products for one weight.

    Parameters
    ----------
    w : WeightParams
    normalization : {"unit", "absolute"}
        ``"unit"`` divides every integral by the mass of ``W_{alpha,gamma}``
        so that ``<1, 1> = 1``.  ``"absolute"`` returns plain integrals
        (always as floats, since the mass involves Gamma values).
    """

    def __init__(self, w: WeightParams, normalization: str = "unit"):
        if normalization not in NORMALIZATIONS:
            raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
        self.w = w
        self.kind = w.kind
        self.normalization = normalization
        self._lock = threading.Lock()
        dtype = float if self.kind == "float" else object
        self._dtype = dtype
        one = to_scalar(1, self.kind)
        self._half_gamma = [(g + 1) / 2 for g in w.gamma]
        # _axis[i][b] = ((gamma_i+1)/2)_b ; _den[t] = (lam+1)_t ; _num[s] = (alpha+1)_s
        self._axis = [np.array([one], dtype=dtype) for _ in w.gamma]
        self._den = np.array([one], dtype=dtype)
        self._num = np.array([one], dtype=dtype)
        self._mass = math.exp(log_mass(w)) if normalization == "absolute" else None
        self._theta_cache: dict = {}

    # -- tables ---------------------------------------------------------------
    def _grow(self, max_b: int, max_t: int, max_s: int) -> None:
        if (len(self._axis[0]) > max_b and len(self._den) > max_t and len(self._num) > max_s):
            return
        with self._lock:
            for i, hg in enumerate(self._half_gamma):
                tab = list(self._axis[i])
                while len(tab) <= max_b:
                    tab.append(tab[-1] * (hg + len(tab) - 1))
                self._axis[i] = np.array(tab, dtype=self._dtype)
            lam1 = self.w.lam + 1
            tab = list(self._den)
            while len(tab) <= max_t:
                tab.append(tab[-1] * (lam1 + len(tab) - 1))
            self._den = np.array(tab, dtype=self._dtype)
            a1 = self.w.alpha + 1
            tab = list(self._num)
            while len(tab) <= max_s:
                tab.append(tab[-1] * (a1 + len(tab) - 1))
            self._num = np.array(tab, dtype=self._dtype)

    def moment_array(self, exps: np.ndarray, alpha_shift: int = 0) -> np.ndarray:
        """Vectorised moments for an integer array of exponents with last axis ``d``."""
        exps = np.asarray(exps, dtype=np.int64)
        if exps.shape[-1] != self.w.d:
            raise ValueError(f"exponent length {exps.shape[-1]} does not match dimension {self.w.d}")
        if alpha_shift < 0:
            raise ValueError("alpha_shift must be non-negative")
        if exps.size == 0:
            return np.zeros(exps.shape[:-1], dtype=self._dtype)
        if exps.ndim > 2 or len(exps) > 64:
            # Gram-type requests repeat the same exponent sums many times;
            # evaluate each distinct exponent once (this dominates for exact scalars)
            flat = exps.reshape(-1, self.w.d)
            base = int(flat.max()) + 1
            keys = flat @ (base ** np.arange(self.w.d, dtype=np.int64))
            _, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
            if len(first) < len(flat):
                vals = self._moment_rows(flat[first], alpha_shift)
                return vals[inverse.reshape(-1)].reshape(exps.shape[:-1])
        return self._moment_rows(exps, alpha_shift)

    def _moment_rows(self, exps: np.ndarray, alpha_shift: int) -> np.ndarray:
        odd = (exps % 2).any(axis=-1)
        b = exps // 2
        bt = b.sum(axis=-1)
        self._grow(int(b.max()), int(bt.max()) + alpha_shift, alpha_shift)
        val = self._axis[0][b[..., 0]]
        for i in range(1, self.w.d):
            val = val * self._axis[i][b[..., i]]
        val = val * self._num[alpha_shift] / self._den[bt + alpha_shift]
        zero = to_scalar(0, self.kind)
        val = np.where(odd, zero, val)
        if self._dtype is object:
            val = val.astype(object)
        if self._mass is not None:
            val = val.astype(float) * self._mass
        return val

    def monomial_moment(self, a, theta=None, alpha_shift: int = 0):
        """Integral of ``x^a prod_i |x_i|^theta_i`` against ``W_{alpha+s,gamma}``.

        Zero exactly when any ``a_i`` is odd.  ``theta`` (per-axis real
        shifts) needs the float kind.
        """
        a = tuple(int(e) for e in a)
        if len(a) != self.w.d:
            raise ValueError(f"multi-index {a} does not match dimension {self.w.d}")
        if any(e < 0 for e in a):
            raise ValueError("multi-index entries must be non-negative")
        if theta is None or not any(theta):
            return self.moment_array(np.array([a]), alpha_shift)[0]
        return self.theta_moment(a, theta, alpha_shift)

    def theta_moment(self, a, theta, alpha_shift: int = 0) -> float:
        if self.kind != "float":
            raise TypeError("fractional exponent shifts need the float kind")
        theta = tuple(float(t) for t in theta)
        if len(theta) != self.w.d:
            raise ValueError("theta must have one entry per dimension")
        if any(e % 2 for e in a):
            return 0.0
        key = (a, theta, alpha_shift)
        if key in self._theta_cache:
            return self._theta_cache[key]
        val = 1.0
        for g, e, t in zip(self.w.gamma, a, theta):
            if not g + t > -1:
                raise ValueError(f"exponent shift {t} makes |x|^({g}+{t}) non-integrable")
            val *= poch((g + 1) / 2, e / 2 + t / 2)
        shift = sum(a) / 2 + sum(theta) / 2 + alpha_shift
        val *= poch(float(self.w.alpha) + 1, alpha_shift) / poch(float(self.w.lam) + 1, shift)
        if self._mass is not None:
            val *= self._mass
        with self._lock:
            self._theta_cache[key] = val
        return val

    # -- integrals of polynomials -----------------------------------------
    def _check(self, p: Polynomial) -> None:
        if p.dim != self.w.d:
            raise ValueError(f"dimension mismatch: polynomial has {p.dim}, weight has {self.w.d}")
        if p.kind != self.kind:
            raise TypeError(f"scalar kind mismatch: polynomial {p.kind}, engine {self.kind}")

    def _zero(self):
        return 0.0 if (self.kind == "float" or self._mass is not None) else mpq(0)

    def integrate(self, p: Polynomial, alpha_shift: int = 0):
        """``<p, 1>_{alpha+s,gamma}``."""
        self._check(p)
        if p.is_zero():
            return self._zero()
        exps, coefs = p.arrays()
        return _dot(coefs, self.moment_array(exps, alpha_shift))

    def inner_product(self, p: Polynomial, q: Polynomial, alpha_shift: int = 0):
        """``<p, q>_{alpha+s,gamma}``."""
        self._check(p)
        self._check(q)
        if p.is_zero() or q.is_zero():
            return self._zero()
        ep, cp = p.arrays()
        eq, cq = q.arrays()
        mom = self.moment_array(ep[:, None, :] + eq[None, :, :], alpha_shift)
        return _dot(cp, mom @ cq) if mom.dtype != object else _dot(cp, _objmatvec(mom, cq))

    def norm2(self, p: Polynomial, alpha_shift: int = 0):
        return self.inner_product(p, p, alpha_shift)

    def gram(self, rows, cols, alpha_shift: int = 0) -> np.ndarray:
        """Matrix of monomial inner products ``<x^a, x^b>`` for exponent lists."""
        ra = np.asarray(rows, dtype=np.int64).reshape(-1, self.w.d)
        ca = np.asarray(cols, dtype=np.int64).reshape(-1, self.w.d)
        return self.moment_array(ra[:, None, :] + ca[None, :, :], alpha_shift)

    # -- Sobolev-type forms -----------------------------------------------
    def sobolev_inner(self, p: Polynomial, q: Polynomial, m: int):
        """Dunkl-Sobolev inner product of order ``m`` with multinomial multiplicities."""
        if m < 0:
            raise ValueError("order must be non-negative")
        total = self._zero()
        for k in range(m + 1):
            gp = dunkl_gradient(p, self.w, k)
            gq = dunkl_gradient(q, self.w, k)
            for (b, mult, dp), (_, _, dq) in zip(gp, gq):
                total = total + mult * self.inner_product(dp, dq)
        return total

    def gradient_inner(self, p: Polynomial, q: Polynomial, alpha_shift: int = 0):
        """``<D p, D q>_{alpha+s,gamma}`` summed over the d components."""
        total = self._zero()
        for j in range(self.w.d):
            total = total + self.inner_product(dunkl(p, j, self.w), dunkl(q, j, self.w), alpha_shift)
        return total

    def bilinear_B(self, p: Polynomial, q: Polynomial, shifted: bool = False):
        """Weak form of the Sturm-Liouville operator; ``shifted`` adds ``K <p, q>``."""
        w = self.w
        total = self.gradient_inner(p, q, alpha_shift=1)
        for i, j in combinations(range(w.d), 2):
            total = total + self.inner_product(dunkl_angular(p, i, j, w), dunkl_angular(q, i, j, w))
        sp = [skew(p, i) for i in range(w.d)]
        sq = [skew(q, i) for i in range(w.d)]
        for i in range(w.d):
            if w.gamma[i]:
                total = total - 2 * w.lam * w.gamma[i] * self.inner_product(sp[i], sq[i])
        for i in range(w.d):
            for j in range(w.d):
                c = w.gamma[i] * w.gamma[j]
                if c:
                    total = total + c * self.inner_product(skew(sp[j], i), skew(sq[j], i))
        if shifted:
            total = total + w.K * self.inner_product(p, q)
        return total

    def equiv_h1_inner(self, p: Polynomial, q: Polynomial):
        """``<D p, D q> + <S_0 p, S_0 q>``, with ``S_0`` the projection onto constants."""
        one = Polynomial.constant(self.w.d, 1, self.kind)
        mean_term = self.integrate(p) * self.integrate(q) / self.inner_product(one, one)
        return self.gradient_inner(p, q) + mean_term


def _objmatvec(mat: np.ndarray, vec: np.ndarray) -> np.ndarray:
    return np.array([_dot(row, vec) for row in mat], dtype=object)


def _dot(a: np.ndarray, b: np.ndarray):
    if a.dtype == object or b.dtype == object:
        return sum(map(operator.mul, a, b), mpq(0))
    return float(np.dot(a, b))
