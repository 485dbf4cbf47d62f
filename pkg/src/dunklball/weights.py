"""Parameters of the ball weight ``(1 - |x|^2)^alpha * prod_i |x_i|^gamma_i``."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from .multipoly import is_rational_scalar, to_scalar


@dataclass(frozen=True)
class WeightParams:
    """Weight parameters together with the derived spectral scalars.

    ``lam`` is ``alpha + sum(gamma)/2 + d/2``; the Sturm-Liouville operator
    has eigenvalue ``n(n + 2 lam)`` on degree-``n`` orthogonal polynomials.
    ``K`` is a shift making ``n(n + 2 lam) + K`` positive for every ``n``,
    and ``M`` bounds the reflection terms of the bilinear form from below.

    Scalars carry the requested ``kind``: floats, or exact rationals.
    """

    alpha: object
    gamma: tuple
    kind: str = "float"
    d: int = field(init=False)
    lam: object = field(init=False)
    K: object = field(init=False)
    M: object = field(init=False)
    s_gamma: object = field(init=False)

    def __post_init__(self):
        kind = self.kind
        alpha = to_scalar(self.alpha, kind)
        gamma = tuple(to_scalar(g, kind) for g in self.gamma)
        if not gamma:
            raise ValueError("gamma must have at least one entry (one per dimension)")
        if not alpha > -1:
            raise ValueError(f"alpha must exceed -1, got {alpha}")
        for i, g in enumerate(gamma):
            if not g > -1:
                raise ValueError(f"gamma[{i}] must exceed -1, got {g}")
        d = len(gamma)
        half = to_scalar(mpq(1, 2), kind)
        s = sum(gamma, to_scalar(0, kind))
        lam = alpha + half * s + half * d
        # smallest admissible shift is max(0, -1 - 2 lam); add 1 to stay strictly above it
        k_floor = max(to_scalar(0, kind), -1 - 2 * lam)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "s_gamma", s)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "K", k_floor + 1)
        m = 2 * abs(lam) * sum((abs(g) for g in gamma), to_scalar(0, kind))
        m += sum((abs(gi * gj) for gi in gamma for gj in gamma), to_scalar(0, kind))
        object.__setattr__(self, "M", m)

    @classmethod
    def make(cls, alpha, gamma: Sequence, kind: str = "float") -> "WeightParams":
        return cls(alpha, tuple(gamma), kind)

    def shifted(self, s: int) -> "WeightParams":
        """Same gamma, ``alpha + s``."""
        return WeightParams(self.alpha + s, self.gamma, self.kind)

    def astype(self, kind: str) -> "WeightParams":
        if kind == self.kind:
            return self
        return WeightParams(self.alpha, self.gamma, kind)

    @property
    def beta_prime(self):
        """Second Jacobi parameter ``sum(gamma)/2 + (d-2)/2`` of the radial profiles."""
        half = to_scalar(mpq(1, 2), self.kind)
        return half * self.s_gamma + half * (self.d - 2)

    def eigenvalue(self, n: int):
        return n * (n + 2 * self.lam)

    def describe(self) -> dict:
        return {
            "d": self.d,
            "alpha": _plain(self.alpha),
            "gamma": [_plain(g) for g in self.gamma],
            "kind": self.kind,
        }


def _plain(x):
    if is_rational_scalar(x):
        return str(x) if x.denominator != 1 else int(x)
    return x
