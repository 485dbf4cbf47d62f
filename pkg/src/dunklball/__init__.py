"""Dunkl-operator calculus and weighted orthogonal polynomials on the unit ball.

The weight is ``W(x) = (1 - |x|^2)^alpha * prod_i |x_i|^gamma_i`` on the unit
ball of R^d.  Scalars are floats or exact rationals throughout.
"""
from .dunkl import (dunkl, dunkl_angular, dunkl_gradient, dunkl_multi, dunkl_star, euler, h_laplacian,
                    sturm_liouville)
from .harness import (ExperimentRecord, SharpnessRow, converge, fit_slope, sharp_ratio, sharp_sequence,
                      sharpness_table)
from .moments import MomentEngine
from .multipoly import (Polynomial, evaluate, hadamard, partial_derivative, random_polynomial, reflect, rho,
                        skew, sym)
from .orthobasis import (AxisPower, BasisRankError, OrthoBasis, RadialJacobi, build_basis, jacobi_eval,
                         jacobi_norm, jacobi_poly)
from .propcheck import REGISTRY, CheckParams, CheckReport, run_all, run_check
from .weights import WeightParams

__all__ = [
    "AxisPower", "BasisRankError", "CheckParams", "CheckReport", "ExperimentRecord", "MomentEngine",
    "OrthoBasis", "Polynomial", "REGISTRY", "RadialJacobi", "SharpnessRow", "WeightParams", "build_basis",
    "converge", "dunkl", "dunkl_angular", "dunkl_gradient", "dunkl_multi", "dunkl_star", "euler",
    "evaluate", "fit_slope", "h_laplacian", "hadamard", "jacobi_eval", "jacobi_norm", "jacobi_poly",
    "partial_derivative", "random_polynomial", "reflect", "rho", "run_all", "run_check", "sharp_ratio",
    "sharp_sequence", "sharpness_table", "skew", "sturm_liouville", "sym",
]
