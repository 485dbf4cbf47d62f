"""Projection-error experiments: sharpness sequence, convergence runs, slope fits.

Radial polynomials ``f(|x|^2)`` are handled through their one-variable
profile ``f(rho)``.  Because ``D_j f(|x|^2) = 2 x_j f'(|x|^2)`` (the
difference part vanishes on reflection-invariant functions) and
``<|x|^{2k}, 1> = (lam - alpha)_k / (lam + 1)_k`` in unit mass, every norm
needed for the sharpness experiment reduces to exact rational sums over
profile coefficients.  That route stays exact up to degree 50 and beyond,
far past the point where a monomial Gram-Schmidt basis is trustworthy.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from .dunkl import dunkl
from .moments import MomentEngine
from .multipoly import Polynomial, to_scalar
from .orthobasis import AxisPower, OrthoBasis, RadialJacobi, build_basis, jacobi_poly
from .weights import WeightParams

POLY_CONSTRUCTION_CAP = 25  # largest n with t_n built as a d-variate polynomial (degree 2n <= 50)


# -- radial profiles ---------------------------------------------------------------

def _radial_moments(w: WeightParams, upto: int) -> list:
    """``mu_k = <|x|^{2k}, 1>`` for ``k = 0..upto`` in unit mass."""
    one = to_scalar(1, w.kind)
    a = w.lam - w.alpha
    out = [one]
    for k in range(upto):
        out.append(out[-1] * (a + k) / (w.lam + 1 + k))
    return out


def radial_inner(w: WeightParams, f: Polynomial, g: Polynomial):
    """``<f(|x|^2), g(|x|^2)>_{alpha,gamma}`` from one-variable profiles."""
    top = max(f.degree, 0) + max(g.degree, 0)
    mu = _radial_moments(w, top)
    total = to_scalar(0, w.kind)
    for (a,), c in f.items():
        for (b,), e in g.items():
            total += c * e * mu[a + b]
    return total


def radial_grad_norm2(w: WeightParams, f: Polynomial):
    """``||D f(|x|^2)||^2 = 4 <|x|^2 f'(|x|^2)^2, 1>``."""
    df = f.diff(0)
    rho = Polynomial.variable(1, 0, f.kind)
    return 4 * radial_inner(w, rho * df, df)


def radial_profile_to_poly(f: Polynomial, dim: int) -> Polynomial:
    """Substitute ``rho = |x|^2`` into a one-variable profile."""
    return f.compose_univariate(Polynomial.norm_squared(dim, f.kind))


# -- sharpness sequence --------------------------------------------------------------

def _exact(w: WeightParams) -> WeightParams:
    return w.astype("rational")


@dataclass
class SharpnessSequence:
    """Radial test polynomial ``t_n`` and its top-degree part ``R_n``.

    ``t_profile`` and ``R_profile`` are exact one-variable profiles in
    ``rho = |x|^2``; :meth:`polynomials` expands them in ``d`` variables.
    """

    w: WeightParams
    n: int
    beta_prime: object
    t_profile: Polynomial
    R_profile: Polynomial
    lower_profile: Polynomial
    _cache: dict = field(default_factory=dict, repr=False)

    def polynomials(self, kind: str | None = None) -> tuple[Polynomial, Polynomial]:
        """``(t_n, R_n)`` as ``d``-variate polynomials in ``kind`` (default: the weight's kind)."""
        kind = kind or self.w.kind
        if self.n > POLY_CONSTRUCTION_CAP:
            raise ValueError(f"polynomial construction is capped at n <= {POLY_CONSTRUCTION_CAP}")
        if kind not in self._cache:
            t = radial_profile_to_poly(self.t_profile, self.w.d).astype(kind)
            r = radial_profile_to_poly(self.R_profile, self.w.d).astype(kind)
            self._cache[kind] = (t, r)
        return self._cache[kind]

    @property
    def t(self) -> Polynomial:
        return self.polynomials()[0]

    @property
    def R(self) -> Polynomial:
        return self.polynomials()[1]

    def norms(self) -> dict:
        """Exact radial-route norms (rational) of ``t_n`` and ``R_n``."""
        we = _exact(self.w)
        return {
            "t_l2": radial_inner(we, self.t_profile, self.t_profile),
            "t_grad": radial_grad_norm2(we, self.t_profile),
            "R_l2": radial_inner(we, self.R_profile, self.R_profile),
            "R_grad": radial_grad_norm2(we, self.R_profile),
        }


def sharp_coefficients(w: WeightParams, n: int) -> tuple:
    """The two coefficients multiplying ``P_n`` and ``P_{n-1}`` in ``t_n``."""
    den = 4 * n + 2 * w.lam - 2
    return (2 * n + 2 * w.lam - 2) / den, (2 * n + w.s_gamma + w.d - 2) / den


def sharp_sequence(w: WeightParams, n: int) -> SharpnessSequence:
    """Build ``t_n`` and ``R_n`` for ``n >= 1`` (profiles are exact)."""
    if n < 1:
        raise ValueError("the sharpness sequence starts at n = 1")
    we = _exact(w)
    bp = we.beta_prime
    c1, c2 = sharp_coefficients(we, n)
    arg = Polynomial.variable(1, 0, "rational").scale(2) - 1
    top = jacobi_poly(n, we.alpha, bp, "rational").compose_univariate(arg).scale(c1)
    low = jacobi_poly(n - 1, we.alpha, bp, "rational").compose_univariate(arg).scale(-c2)
    return SharpnessSequence(w, n, bp, top + low, top, low)


def sharp_ratio_closed(w: WeightParams, n: int):
    """``(2n + 2 lam)(n + alpha) / ((alpha + 1)(4n + 2 lam - 2))``."""
    if n < 2:
        raise ValueError("the ratio formula needs n >= 2")
    return (2 * n + 2 * w.lam) * (n + w.alpha) / ((w.alpha + 1) * (4 * n + 2 * w.lam - 2))


def sharp_ratio(w: WeightParams, n: int, mode: str = "closed_form"):
    """``||D R_n||^2 / ||D t_n||^2``.

    ``closed_form`` evaluates the simplified formula; ``from_polynomials``
    expands ``t_n`` and ``R_n`` in ``d`` variables and integrates with the
    moment engine (exact arithmetic, rounded at the end for float weights).
    """
    if n < 2:
        raise ValueError("the ratio formula needs n >= 2")
    if mode == "closed_form":
        return sharp_ratio_closed(w, n)
    if mode == "from_polynomials":
        seq = sharp_sequence(w, n)
        t, r = seq.polynomials("rational")
        eng = MomentEngine(_exact(w))
        val = eng.gradient_inner(r, r) / eng.gradient_inner(t, t)
        return val if w.kind == "rational" else float(val)
    if mode == "radial":
        nm = sharp_sequence(w, n).norms()
        val = nm["R_grad"] / nm["t_grad"]
        return val if w.kind == "rational" else float(val)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class SharpnessRow:
    n: int
    ratio_closed: float
    ratio_poly: float
    normalized_h1_error: float
    normalized_equiv_error: float


def sharpness_table(w: WeightParams, n_max: int, n_min: int = 2, poly_cap: int = 12) -> list[SharpnessRow]:
    """Rows ``n = n_min..n_max``.

    ``normalized_h1_error`` is ``||R_n||_{1} / (||t_n||_{1} sqrt(2n-1))`` with the
    order-1 Dunkl-Sobolev norm (exact radial route, ``nan`` past the
    construction cap); ``normalized_equiv_error`` uses the equivalent norm
    ``||D u|| + ||S_0 u||`` instead.  ``ratio_poly`` is ``nan`` for ``n > poly_cap``.
    """
    if n_min < 2:
        raise ValueError("rows start at n >= 2")
    rows = []
    for n in range(n_min, n_max + 1):
        closed = float(sharp_ratio_closed(w, n))
        poly = float(sharp_ratio(w, n, "from_polynomials")) if n <= poly_cap else math.nan
        if n <= POLY_CONSTRUCTION_CAP:
            nm = sharp_sequence(w, n).norms()
            h1 = math.sqrt(float((nm["R_l2"] + nm["R_grad"]) / (nm["t_l2"] + nm["t_grad"])) / (2 * n - 1))
            eq = math.sqrt(float(nm["R_grad"] / nm["t_grad"]) / (2 * n - 1))
        else:
            h1 = eq = math.nan
        rows.append(SharpnessRow(n, closed, poly, h1, eq))
    return rows


# -- convergence experiments --------------------------------------------------------

@dataclass(frozen=True)
class ExperimentRecord:
    """One truncation degree of a convergence run (errors and reference norms, not squared)."""

    N: int
    err_l2: float
    err_hr: float
    norm_l2: float
    norm_hr: float
    r: int = 1


def _ensure_basis(w: WeightParams, n_cap: int, basis: OrthoBasis | None) -> OrthoBasis:
    if basis is None:
        basis = build_basis(w, n_cap)
    if basis.max_degree < n_cap:
        raise ValueError(f"N = {n_cap} exceeds the basis cap {basis.max_degree}")
    return basis


def converge(w: WeightParams, u, r: int, N_list: Sequence[int], basis: OrthoBasis | None = None,
             ) -> list[ExperimentRecord]:
    """Truncation errors ``||u - S_N u||`` in L2 and in the order-``r`` Dunkl-Sobolev norm.

    L2 errors come from the Parseval tail ``||u||^2 - sum_{k<=N} ||proj_k u||^2``.
    For ``r = 1`` and non-polynomial ``u`` the gradient part is expanded as
    ``||Du||^2 - 2 <Du, D S_N u> + ||D S_N u||^2`` with exact cross terms.
    Polynomial ``u`` allows any ``r``; the residual is formed explicitly.
    """
    N_list = list(N_list)
    if not N_list:
        return []
    if any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise ValueError("N_list must be strictly increasing")
    if r < 0:
        raise ValueError("r must be non-negative")
    if isinstance(u, RadialJacobi):
        u = u.to_polynomial(w)
    if isinstance(u, Polynomial):
        return _converge_poly(w, u, r, N_list, basis)
    if isinstance(u, AxisPower):
        if r > 1:
            raise ValueError("r >= 2 leaves the closed-form family for axis powers")
        return _converge_axis(w, u, r, N_list, basis)
    raise TypeError(f"unsupported test function {type(u).__name__}")


def _converge_poly(w, u, r, N_list, basis):
    short = [N for N in N_list if N < u.degree]
    if short:
        basis = _ensure_basis(w, max(short), basis)
    eng = basis.engine if basis is not None else MomentEngine(w)
    norm_l2 = eng.norm2(u)
    norm_hr = eng.sobolev_inner(u, u, r)
    out = []
    for N in N_list:
        if N >= u.degree:
            # S_N is the identity on polynomials of degree <= N
            e_l2 = e_hr = 0.0
        else:
            res = u - basis.truncate(u, N)
            e_l2 = float(eng.norm2(res))
            e_hr = float(eng.sobolev_inner(res, res, r))
        out.append(ExperimentRecord(N, math.sqrt(max(e_l2, 0.0)), math.sqrt(max(e_hr, 0.0)),
                                    math.sqrt(float(norm_l2)), math.sqrt(float(norm_hr)), r))
    return out


def _converge_axis(w, u: AxisPower, r, N_list, basis):
    if w.kind != "float":
        raise TypeError("axis powers have irrational moments; use a float weight")
    basis = _ensure_basis(w, N_list[-1], basis)
    eng = basis.engine
    comp = basis.component_norms2(u, N_list[-1])
    norm_l2 = u.norm2(eng)
    du = None
    grad = 0.0
    if r == 1:
        du = u.dunkl(u.axis, w)
        if du is not None:
            g = float(w.gamma[u.axis]) + 2 * du.theta
            if not g > -1:
                raise ValueError("this axis power has an infinite first-order Dunkl-Sobolev norm")
            grad = du.norm2(eng)
    out = []
    partial = 0.0
    k_done = -1
    for N in N_list:
        for k in range(k_done + 1, N + 1):
            partial += float(comp[k])
        k_done = N
        e_l2 = max(norm_l2 - partial, 0.0)
        if r == 1:
            s = basis.truncate(u, N)
            ds = dunkl(s, u.axis, w)
            cross = du.inner(eng, ds) if du is not None else 0.0
            ds_norm = eng.gradient_inner(s, s)
            e_grad = max(grad - 2 * cross + float(ds_norm), 0.0)
            e_hr = e_l2 + e_grad
            n_hr = norm_l2 + grad
        else:
            e_hr, n_hr = e_l2, norm_l2
        out.append(ExperimentRecord(N, math.sqrt(e_l2), math.sqrt(e_hr), math.sqrt(norm_l2), math.sqrt(n_hr), r))
    return out


def fit_slope(records: Iterable, window: tuple | None = None, field: str = "err_l2") -> tuple[float, float]:
    """Least-squares slope of ``log err`` against ``log N`` and its standard error.

    ``records`` may be :class:`ExperimentRecord` objects or ``(N, err)`` pairs;
    ``window = (lo, hi)`` keeps ``lo <= N <= hi``.
    """
    pts = []
    for rec in records:
        n, e = (rec.N, getattr(rec, field)) if isinstance(rec, ExperimentRecord) else rec
        if window is not None and not (window[0] <= n <= window[1]):
            continue
        if e > 0 and n > 0:
            pts.append((math.log(n), math.log(e)))
    if len(pts) < 3:
        raise ValueError("need at least three points with positive error")
    x, y = np.array(pts).T
    res = stats.linregress(x, y)
    return float(res.slope), float(res.stderr)


# -- CSV output ---------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def write_convergence_csv(records: Sequence[ExperimentRecord], fh) -> None:
    r = records[0].r if records else 1
    wr = csv.writer(fh, lineterminator="\n")
    wr.writerow(["N", "err_l2", f"err_h{r}", "norm_l2", f"norm_h{r}"])
    for rec in records:
        wr.writerow([rec.N, _fmt(rec.err_l2), _fmt(rec.err_hr), _fmt(rec.norm_l2), _fmt(rec.norm_hr)])


def write_sharpness_csv(rows: Sequence[SharpnessRow], fh) -> None:
    wr = csv.writer(fh, lineterminator="\n")
    wr.writerow(["n", "ratio_closed", "ratio_poly", "normalized_h1_error"])
    for row in rows:
        wr.writerow([row.n, _fmt(row.ratio_closed), _fmt(row.ratio_poly), _fmt(row.normalized_h1_error)])
