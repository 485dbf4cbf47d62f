"""Executable identity checks for the Dunkl calculus and the orthogonal expansions.

Each check runs one identity over seeded random polynomials (or over every
element of a Gram-Schmidt basis) and returns a :class:`CheckReport` with the
worst residual.  With rational weights every identity must hold with
residual exactly zero; with floats residuals are relative and compared
with a threshold.

Every run covers the requested weight plus three corner cases derived from
it: all ``gamma_i = 0``, a single nonzero ``gamma_i``, and ``d = 1``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

import numpy as np
from gmpy2 import mpq

from .dunkl import dunkl, dunkl_angular, dunkl_star, sturm_liouville
from .moments import MomentEngine
from .multipoly import Polynomial, hadamard, random_polynomial, reflect, rho
from .orthobasis import TRUSTED_DEGREE, BasisRankError, OrthoBasis, build_basis, radial_jacobi
from .weights import WeightParams

FLOAT_THRESHOLD = 1e-8
CORNER_DRAWS = 5


@dataclass(frozen=True)
class CheckParams:
    """Inputs of a check run.  ``backend`` is ``"float"`` or ``"rational"``."""

    d: int
    alpha: object
    gamma: tuple
    degree: int = 8
    seed: int = 0
    backend: str = "rational"
    draws: int = 50
    threshold: float | None = None

    def weight(self) -> WeightParams:
        return WeightParams(self.alpha, tuple(self.gamma), self.backend)

    def describe(self) -> dict:
        w = self.weight()
        return {**w.describe(), "degree": self.degree, "seed": self.seed, "backend": self.backend,
                "draws": self.draws}


@dataclass
class CheckReport:
    check_id: str
    params: dict
    max_residual: float
    threshold: float
    passed: bool
    witnesses: list = field(default_factory=list)
    error: str | None = None

    def to_dict(self) -> dict:
        out = {"check_id": self.check_id, "params": self.params, "max_residual": self.max_residual,
               "threshold": self.threshold, "pass": self.passed}
        if self.error:
            out["error"] = self.error
        return out


# -- per-weight context ----------------------------------------------------------

class _Context:
    """Weight, engine, lazily built bases and residual helpers for one weight."""

    def __init__(self, w: WeightParams, degree: int, label: str):
        self.w = w
        self.kind = w.kind
        self.degree = degree
        self.label = label
        self.eng = MomentEngine(w)
        self._bases: dict = {}

    def basis(self, shift: int = 0) -> OrthoBasis:
        if shift not in self._bases:
            self._bases[shift] = build_basis(self.eng, self.degree + 2, alpha_shift=shift)
        return self._bases[shift]

    def rand(self, rng, degree: int | None = None) -> Polynomial:
        return random_polynomial(self.w.d, self.degree if degree is None else degree, rng, self.kind)

    def zero(self) -> Polynomial:
        return Polynomial.zero(self.w.d, self.kind)

    # residuals ---------------------------------------------------------------
    def poly_res(self, lhs: Polynomial, rhs: Polynomial, *scale: Polynomial):
        diff = (lhs - rhs).max_abs_coefficient()
        if self.kind == "rational":
            return diff
        ref = max([lhs.max_abs_coefficient(), rhs.max_abs_coefficient()]
                  + [p.max_abs_coefficient() for p in scale] + [1e-300])
        return float(diff) / ref

    def scalar_res(self, a, b, scale=0.0):
        if self.kind == "rational":
            return abs(a - b)
        ref = max(abs(float(a)), abs(float(b)), abs(float(scale)), 1e-300)
        return abs(float(a) - float(b)) / ref

    def violation(self, lhs, rhs):
        """Amount by which ``lhs <= rhs`` fails, relative to ``|rhs|``."""
        gap = lhs - rhs
        if self.kind == "rational":
            return max(gap, mpq(0)) / max(abs(rhs), mpq(1, 10 ** 30))
        return max(float(gap), 0.0) / max(abs(float(rhs)), 1e-300)

    def mu(self, n: int):
        return n * (n + 2 * self.w.lam) + self.w.K

    def basis_elements(self, shift: int = 0):
        b = self.basis(shift)
        for k in range(self.degree + 1):
            for i, e in enumerate(b.levels[k]):
                yield k, i, e


@dataclass(frozen=True)
class _Check:
    check_id: str
    fn: Callable
    uses_basis: bool
    random: bool
    threshold: float | None


REGISTRY: dict[str, _Check] = {}


def _register(check_id: str, uses_basis: bool = True, random: bool = True, threshold: float | None = None):
    def deco(fn):
        REGISTRY[check_id] = _Check(check_id, fn, uses_basis, random, threshold)
        return fn
    return deco


# -- reflections and the weight ------------------------------------------------------

@_register("prop_flip_1", uses_basis=False)
def _flip_1(ctx: _Context, rng, draws):
    """A reflection-odd integrand has zero weighted mean."""
    for t in range(draws):
        p = ctx.rand(rng)
        scale = float(ctx.eng.norm2(p)) ** 0.5
        for j in range(ctx.w.d):
            odd = p - reflect(p, j)
            yield ctx.scalar_res(ctx.eng.integrate(odd), 0, scale), (t, j)


@_register("prop_flip_2", random=False)
def _flip_2(ctx: _Context, rng, draws):
    """Reflecting an orthogonal polynomial stays in its space."""
    b = ctx.basis()
    for k, i, e in ctx.basis_elements():
        for j in range(ctx.w.d):
            q = reflect(e, j)
            yield ctx.poly_res(q, b.project(q, k)), (k, i, j)


# -- parameter shifts --------------------------------------------------------------------

@_register("prop_id_shift_1", random=False)
def _id_shift_1(ctx: _Context, rng, draws):
    """``(1 - |x|^2) p`` for ``p`` of degree ``k`` (weight alpha+1) lives in degrees k and k+2 (weight alpha)."""
    b = ctx.basis()
    one_minus = 1 - Polynomial.norm_squared(ctx.w.d, ctx.kind)
    for k, i, e in ctx.basis_elements(shift=1):
        q = one_minus * e
        yield ctx.poly_res(q, b.project(q, k) + b.project(q, k + 2)), (k, i)


@_register("prop_id_shift_2", random=False)
def _id_shift_2(ctx: _Context, rng, draws):
    """``q = proj^{a+1}_{k-2} q + proj^{a+1}_k q`` for ``q`` orthogonal of degree ``k``."""
    b1 = ctx.basis(1)
    for k, i, e in ctx.basis_elements():
        yield ctx.poly_res(e, b1.project(e, k - 2) + b1.project(e, k)), (k, i)


@_register("prop_id_shift_3")
def _id_shift_3(ctx: _Context, rng, draws):
    b, b1 = ctx.basis(), ctx.basis(1)
    for t in range(draws):
        u = ctx.rand(rng)
        for k in range(ctx.degree + 1):
            lhs = b1.project(u, k)
            rhs = b1.project(b.project(u, k) + b.project(u, k + 2), k)
            yield ctx.poly_res(lhs, rhs, u), (t, k)


@_register("prop_id_shift_4")
def _id_shift_4(ctx: _Context, rng, draws):
    b, b1 = ctx.basis(), ctx.basis(1)
    for t in range(draws):
        u = ctx.rand(rng)
        for k in range(ctx.degree + 1):
            pk = b.project(u, k)
            lhs = b1.project(u, k)
            rhs = pk + b1.project(b.project(u, k + 2), k) - b1.project(pk, k - 2)
            yield ctx.poly_res(lhs, rhs, u), (t, k)


@_register("prop_diff_shift_1", uses_basis=False)
def _diff_shift_1(ctx: _Context, rng, draws):
    """``<D_j p, q>_{a+1} = <p, D*_j q>_a``."""
    eng = ctx.eng
    for t in range(draws):
        p, q = ctx.rand(rng), ctx.rand(rng)
        for j in range(ctx.w.d):
            dp, dsq = dunkl(p, j, ctx.w), dunkl_star(q, j, ctx.w)
            lhs = eng.inner_product(dp, q, 1)
            rhs = eng.inner_product(p, dsq)
            scale = (float(eng.norm2(dp, 1)) * float(eng.norm2(q, 1))) ** 0.5 + \
                (float(eng.norm2(p)) * float(eng.norm2(dsq))) ** 0.5
            yield ctx.scalar_res(lhs, rhs, scale), (t, j)


@_register("prop_diff_shift_2", random=False)
def _diff_shift_2(ctx: _Context, rng, draws):
    """``D*_j`` maps degree-k orthogonal polynomials of weight alpha+1 to degree k+1 of weight alpha."""
    b = ctx.basis()
    for k, i, e in ctx.basis_elements(shift=1):
        for j in range(ctx.w.d):
            q = dunkl_star(e, j, ctx.w)
            yield ctx.poly_res(q, b.project(q, k + 1)), (k, i, j)


@_register("prop_diff_shift_3", random=False)
def _diff_shift_3(ctx: _Context, rng, draws):
    """``D_j`` maps degree-k orthogonal polynomials of weight alpha to degree k-1 of weight alpha+1."""
    b1 = ctx.basis(1)
    for k, i, e in ctx.basis_elements():
        for j in range(ctx.w.d):
            q = dunkl(e, j, ctx.w)
            yield ctx.poly_res(q, b1.project(q, k - 1), e), (k, i, j)


@_register("prop_diff_shift_4")
def _diff_shift_4(ctx: _Context, rng, draws):
    """``D_j proj^a_k u = proj^{a+1}_{k-1} D_j u``."""
    b, b1 = ctx.basis(), ctx.basis(1)
    for t in range(draws):
        u = ctx.rand(rng)
        for j in range(ctx.w.d):
            du = dunkl(u, j, ctx.w)
            for k in range(ctx.degree + 1):
                lhs = dunkl(b.project(u, k), j, ctx.w)
                rhs = b1.project(du, k - 1)
                yield ctx.poly_res(lhs, rhs, du), (t, j, k)


# -- angular operators ---------------------------------------------------------------

@_register("prop_angular_1", uses_basis=False)
def _angular_1(ctx: _Context, rng, draws):
    """``<D_ij p, q> = -<p, D_ij q>``."""
    eng = ctx.eng
    for t in range(draws):
        p, q = ctx.rand(rng), ctx.rand(rng)
        for i, j in combinations(range(ctx.w.d), 2):
            a = dunkl_angular(p, i, j, ctx.w)
            c = dunkl_angular(q, i, j, ctx.w)
            lhs = eng.inner_product(a, q)
            rhs = -eng.inner_product(p, c)
            scale = (float(eng.norm2(a)) * float(eng.norm2(q))) ** 0.5 + \
                (float(eng.norm2(p)) * float(eng.norm2(c))) ** 0.5
            yield ctx.scalar_res(lhs, rhs, scale), (t, i, j)
    if ctx.w.d == 1:
        yield ctx.scalar_res(0, 0), ("d=1: no angular operators",)


@_register("prop_angular_2", random=False)
def _angular_2(ctx: _Context, rng, draws):
    b = ctx.basis()
    for k, n, e in ctx.basis_elements():
        for i, j in combinations(range(ctx.w.d), 2):
            q = dunkl_angular(e, i, j, ctx.w)
            yield ctx.poly_res(q, b.project(q, k), e), (k, n, i, j)
    if ctx.w.d == 1:
        yield ctx.scalar_res(0, 0), ("d=1: no angular operators",)


@_register("prop_angular_3")
def _angular_3(ctx: _Context, rng, draws):
    b = ctx.basis()
    for t in range(draws):
        u = ctx.rand(rng)
        for i, j in combinations(range(ctx.w.d), 2):
            du = dunkl_angular(u, i, j, ctx.w)
            for k in range(ctx.degree + 1):
                lhs = dunkl_angular(b.project(u, k), i, j, ctx.w)
                yield ctx.poly_res(lhs, b.project(du, k), du), (t, i, j, k)
    if ctx.w.d == 1:
        yield ctx.scalar_res(0, 0), ("d=1: no angular operators",)


# -- the Sturm-Liouville operator ----------------------------------------------------

@_register("eq_L_forms_agree", uses_basis=False, threshold=1e-10)
def _l_forms(ctx: _Context, rng, draws):
    for t in range(draws):
        p = ctx.rand(rng)
        yield ctx.poly_res(sturm_liouville(p, ctx.w, "strong"), sturm_liouville(p, ctx.w, "product"), p), (t,)


@_register("weak_SL", uses_basis=False)
def _weak_sl(ctx: _Context, rng, draws):
    """``<L p, q> = B(p, q)``."""
    eng = ctx.eng
    for t in range(draws):
        p, q = ctx.rand(rng), ctx.rand(rng)
        lp = sturm_liouville(p, ctx.w)
        lhs = eng.inner_product(lp, q)
        rhs = eng.bilinear_B(p, q)
        scale = (float(eng.norm2(lp)) * float(eng.norm2(q))) ** 0.5
        yield ctx.scalar_res(lhs, rhs, scale), (t,)


@_register("parseval_HB")
def _parseval_hb(ctx: _Context, rng, draws):
    """``B~(p, p) = sum_n (n(n + 2 lam) + K) ||proj_n p||^2``."""
    b = ctx.basis()
    for t in range(draws):
        p = ctx.rand(rng)
        comp = b.component_norms2(p, ctx.degree)
        rhs = sum((ctx.mu(n) * c for n, c in enumerate(comp)), ctx.eng._zero())
        yield ctx.scalar_res(ctx.eng.bilinear_B(p, p, shifted=True), rhs), (t,)


@_register("lemma_regularity_summability")
def _regularity(ctx: _Context, rng, draws):
    """``sum_n mu_n^l ||proj_n u||^2`` against ``||(L+K)^{l/2} u||^2`` (even l) or ``B~`` (odd l)."""
    b = ctx.basis()
    eng, w = ctx.eng, ctx.w
    for t in range(draws):
        u = ctx.rand(rng)
        comp = b.component_norms2(u, ctx.degree)
        v = u
        for l in range(0, 5):
            if l >= 2 and l % 2 == 0:
                v = sturm_liouville(v, w) + v.scale(w.K)
            direct = sum((ctx.mu(n) ** l * c for n, c in enumerate(comp)), eng._zero())
            via = eng.norm2(v) if l % 2 == 0 else eng.bilinear_B(v, v, shifted=True)
            yield ctx.scalar_res(direct, via), (t, l)


@_register("cor_L2_rate")
def _l2_rate(ctx: _Context, rng, draws):
    """Parseval tail of ``u - S_N u`` and its bound by ``max_{n>N} mu_n^{-l} sum mu_n^l ||proj_n u||^2``."""
    b = ctx.basis()
    eng = ctx.eng
    for t in range(draws):
        u = ctx.rand(rng)
        comp = b.component_norms2(u, ctx.degree)
        for N in range(ctx.degree):
            tail = sum(comp[N + 1:], eng._zero())
            res = u - b.truncate(u, N)
            yield ctx.scalar_res(eng.norm2(res), tail), (t, N, "tail")
            for l in (1, 2):
                weighted = sum((ctx.mu(n) ** l * c for n, c in enumerate(comp)), eng._zero())
                factor = max(1 / ctx.mu(n) ** l for n in range(N + 1, ctx.degree + 1))
                yield ctx.violation(tail, factor * weighted), (t, N, l)


@_register("approx_ineq_1", random=False)
def _extended_orth(ctx: _Context, rng, draws):
    """``<p, q>_a = ((k + d/2 + s/2)/(a+1) + 1) <p, q>_{a+1}`` on orthogonal polynomials of weight alpha+1."""
    w, eng = ctx.w, ctx.eng
    b1 = ctx.basis(1)
    for k in range(ctx.degree + 1):
        factor = (k + w.d * mpq(1, 2) + w.s_gamma / 2) / (w.alpha + 1) + 1 if ctx.kind == "rational" \
            else (k + w.d / 2 + w.s_gamma / 2) / (w.alpha + 1) + 1
        lv = b1.levels[k]
        for i, p in enumerate(lv):
            for jj in range(i, len(lv)):
                q = lv[jj]
                lhs = eng.inner_product(p, q)
                rhs = factor * eng.inner_product(p, q, 1)
                scale = factor * (float(eng.norm2(p, 1)) * float(eng.norm2(q, 1))) ** 0.5
                yield ctx.scalar_res(lhs, rhs, scale), (k, i, jj)


@_register("approx_ineq_2", random=False)
def _grad_estimation(ctx: _Context, rng, draws):
    """Gradient bound on each orthogonal polynomial, with equality on radial ones."""
    w, eng = ctx.w, ctx.eng
    for k, i, e in ctx.basis_elements():
        bound = (k * (k + 2 * w.lam) + w.M) * (k + w.lam) / (w.alpha + 1)
        yield ctx.violation(eng.gradient_inner(e, e), bound * eng.norm2(e)), (k, i)
    for n in range(ctx.degree // 2 + 1):
        k = 2 * n
        r = radial_jacobi(n, w.alpha, w.beta_prime, w.d, ctx.kind)
        exact = k * (k + 2 * w.lam) * (k + w.lam) / (w.alpha + 1)
        yield ctx.scalar_res(eng.gradient_inner(r, r), exact * eng.norm2(r)), ("radial", k)


@_register("markov", uses_basis=False)
def _markov(ctx: _Context, rng, draws):
    """``||D p||^2 <= (n+1)(n+2 lam)(n^2 + 2 lam n + n + 2M) / (4(alpha+1)) ||p||^2``."""
    w, eng = ctx.w, ctx.eng
    n = ctx.degree
    const = (n + 1) * (n + 2 * w.lam) * (n * n + 2 * w.lam * n + n + 2 * w.M) / (4 * (w.alpha + 1))
    for t in range(draws):
        p = ctx.rand(rng)
        yield ctx.violation(eng.gradient_inner(p, p), const * eng.norm2(p)), (t,)


@_register("lemma_T_proj_commute")
def _telescoping(ctx: _Context, rng, draws):
    """``D_j S_n u - S_n D_j u = proj^{a+1}_{n-1} proj^a_{n+1} D_j u - proj^{a+1}_n proj^a_n D_j u``."""
    b, b1 = ctx.basis(), ctx.basis(1)
    for t in range(draws):
        u = ctx.rand(rng)
        for j in range(ctx.w.d):
            du = dunkl(u, j, ctx.w)
            s_u = ctx.zero()
            s_du = ctx.zero()
            for n in range(ctx.degree + 1):
                s_u = s_u + b.project(u, n)
                s_du = s_du + b.project(du, n)
                lhs = dunkl(s_u, j, ctx.w) - s_du
                rhs = b1.project(b.project(du, n + 1), n - 1) - b1.project(b.project(du, n), n)
                yield ctx.poly_res(lhs, rhs, du), (t, j, n)


@_register("hadamard_H0", uses_basis=False)
def _hadamard(ctx: _Context, rng, draws):
    """``H_0(d_j f) = rho_j(f)``; float runs also compare ``H_0`` against Gauss-Legendre quadrature."""
    nodes, weights = np.polynomial.legendre.leggauss(ctx.degree + 2)
    for t in range(draws):
        f = ctx.rand(rng)
        for j in range(ctx.w.d):
            h = hadamard(f.diff(j), 0, axis=j)
            yield ctx.poly_res(h, rho(f, j), f), (t, j)
            if ctx.kind == "float":
                g = f.diff(j)
                x = rng.uniform(-1, 1, ctx.w.d) / np.sqrt(ctx.w.d)
                pts = np.repeat(x[None, :], len(nodes), axis=0)
                pts[:, j] = nodes * x[j]
                quad = float(sum(wt * g(pt) for wt, pt in zip(weights, pts)))
                yield ctx.scalar_res(h(x), quad, max(abs(c) for c in g.terms.values()) if g else 1.0), (t, j, "quad")


@_register("h1_equiv")
def _h1_equiv(ctx: _Context, rng, draws):
    """Equivalent H1 product: closed form vs basis projection, and ``||p||_P <= ||p||_{1}``."""
    b = ctx.basis()
    eng = ctx.eng
    for t in range(draws):
        p, q = ctx.rand(rng), ctx.rand(rng)
        lhs = eng.equiv_h1_inner(p, q)
        rhs = eng.gradient_inner(p, q) + eng.inner_product(b.project(p, 0), b.project(q, 0))
        yield ctx.scalar_res(lhs, rhs), (t, "product")
        yield ctx.violation(eng.equiv_h1_inner(p, p), eng.sobolev_inner(p, p, 1)), (t, "upper")
        pos = eng.equiv_h1_inner(p, p)
        yield (ctx.violation(0, pos) if pos > 0 else (mpq(1) if ctx.kind == "rational" else 1.0)), \
            (t, "positive")


# -- running ------------------------------------------------------------------------------

def corner_weights(w: WeightParams) -> list[tuple[str, WeightParams]]:
    """The requested weight followed by the three reduction cases."""
    out = [("main", w)]
    out.append(("gamma=0", WeightParams(w.alpha, (0,) * w.d, w.kind)))
    nz = next((g for g in w.gamma if g), None)
    single = nz if nz is not None else (mpq(1, 2) if w.kind == "rational" else 0.5)
    out.append(("single-gamma", WeightParams(w.alpha, (single,) + (0,) * (w.d - 1), w.kind)))
    out.append(("d=1", WeightParams(w.alpha, (w.gamma[0],), w.kind)))
    return out


def _required_degree(check: _Check, params: CheckParams) -> int:
    return params.degree + 2 if check.uses_basis else params.degree


def run_check(check_id: str, params: CheckParams, _contexts: list | None = None) -> CheckReport:
    """Run one registered check over the requested weight and its corner cases."""
    if check_id not in REGISTRY:
        raise KeyError(f"unknown check_id {check_id!r}")
    check = REGISTRY[check_id]
    if params.backend not in TRUSTED_DEGREE:
        raise ValueError(f"backend must be one of {tuple(TRUSTED_DEGREE)}")
    cap = TRUSTED_DEGREE[params.backend]
    need = _required_degree(check, params)
    if need > cap:
        raise ValueError(f"{check_id} needs degree {need}, beyond the {params.backend} trust range {cap}")
    if params.degree < 1:
        raise ValueError("degree cap must be at least 1")
    exact = params.backend == "rational"
    threshold = 0.0 if exact else (params.threshold or check.threshold or FLOAT_THRESHOLD)
    contexts = _contexts or [_Context(w, params.degree, label)
                             for label, w in corner_weights(params.weight())]
    worst = mpq(0) if exact else 0.0
    witnesses = []
    for idx, ctx in enumerate(contexts):
        rng = np.random.default_rng([params.seed, idx, _stable_hash(check_id)])
        draws = params.draws if idx == 0 else min(params.draws, CORNER_DRAWS)
        for res, where in check.fn(ctx, rng, draws):
            if res > worst:
                worst = res
            if res > threshold and len(witnesses) < 10:
                witnesses.append({"case": ctx.label, "where": [str(x) for x in where], "residual": float(res)})
    return CheckReport(check_id, params.describe(), float(worst), float(threshold), worst <= threshold, witnesses)


def _stable_hash(s: str) -> int:
    return sum((i + 1) * ord(c) for i, c in enumerate(s)) % (2 ** 31)


def run_all(params: CheckParams, check_ids=None) -> list[CheckReport]:
    """Every registered check in registry order; failures are reported, never raised."""
    contexts = [_Context(w, params.degree, label) for label, w in corner_weights(params.weight())]
    reports = []
    for cid in (check_ids or list(REGISTRY)):
        try:
            reports.append(run_check(cid, params, contexts))
        except (ValueError, ArithmeticError, BasisRankError, KeyError) as exc:
            reports.append(CheckReport(cid, params.describe(), float("inf"), 0.0, False, [], str(exc)))
    return reports


def all_passed(reports) -> bool:
    return all(r.passed for r in reports)


def reports_to_json(reports) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2, default=str)
