"""The closed-form moment formula against quadrature and Monte Carlo oracles."""
import numpy as np
import pytest

from dunklball import MomentEngine, WeightParams
from oracles import ball_integral_quad, ball_moment_mc, ball_moment_quad, moment_gate_tuples

GATE = moment_gate_tuples()


@pytest.mark.parametrize("alpha,gamma,expo", [t for t in GATE if len(t[1]) <= 2])
def test_formula_matches_quadrature(alpha, gamma, expo):
    got = MomentEngine(WeightParams(alpha, gamma)).monomial_moment(expo)
    assert got == pytest.approx(ball_moment_quad(alpha, gamma, expo), rel=1e-10, abs=1e-13)


@pytest.mark.parametrize("alpha,gamma,expo", [t for t in GATE if len(t[1]) == 3])
def test_formula_matches_monte_carlo(alpha, gamma, expo):
    got = MomentEngine(WeightParams(alpha, gamma)).monomial_moment(expo)
    est, se = ball_moment_mc(alpha, gamma, expo, 2_000_000, np.random.default_rng(11))
    assert abs(got - est) <= 3 * se


def test_gate_has_twenty_tuples():
    assert len(GATE) == 20
    assert {len(g) for _, g, _ in GATE} == {1, 2, 3}


def test_disk_example_monte_carlo():
    got = MomentEngine(WeightParams(1, (0, 0), "rational")).monomial_moment((2, 0))
    assert got == pytest.approx(1 / 6) and str(got) == "1/6"
    est, se = ball_moment_mc(1.0, (0.0, 0.0), (2, 0), 4_000_000, np.random.default_rng(3))
    assert abs(est - 1 / 6) <= 3 * se


@pytest.mark.parametrize("alpha,gamma,shift", [(0.5, (0.25, -0.5), 1), (-0.6, (1.5,), 2), (0.0, (0.0, 0.3), 3)])
def test_alpha_shift_matches_quadrature(alpha, gamma, shift):
    """Shifted moments stay normalised by the unshifted mass."""
    eng = MomentEngine(WeightParams(alpha, gamma))
    expo = (2,) * len(gamma)
    zero = [0] * len(gamma)
    want = ball_integral_quad(alpha + shift, gamma, expo) / ball_integral_quad(alpha, gamma, zero)
    assert eng.monomial_moment(expo, alpha_shift=shift) == pytest.approx(want, rel=1e-10)
