"""The registry of executable identity checks."""
import json
from fractions import Fraction

import pytest

from dunklball.propcheck import (REGISTRY, CheckParams, CheckReport, all_passed, corner_weights,
                                 reports_to_json, run_all, run_check)

F = Fraction
RATIONAL = CheckParams(2, F(1, 2), (F(1, 4), F(-1, 2)), degree=6, seed=7, backend="rational", draws=6)
FLOAT3 = CheckParams(3, -0.5, (0.5, 0.0, 1.5), degree=6, seed=7, backend="float", draws=6)

SPEC_IDS = ["prop_flip_1", "prop_id_shift_1", "prop_id_shift_2", "prop_id_shift_3", "prop_id_shift_4",
            "prop_diff_shift_1", "prop_diff_shift_2", "prop_diff_shift_3", "prop_diff_shift_4",
            "prop_angular_1", "prop_angular_2", "prop_angular_3", "eq_L_forms_agree", "weak_SL",
            "parseval_HB", "lemma_regularity_summability", "cor_L2_rate", "markov",
            "lemma_T_proj_commute", "hadamard_H0", "h1_equiv"]


def test_registry_covers_named_checks():
    assert set(SPEC_IDS) <= set(REGISTRY)


@pytest.mark.parametrize("check_id", sorted(REGISTRY))
def test_rational_checks_are_exact(check_id):
    rep = run_check(check_id, RATIONAL)
    assert rep.max_residual == 0.0 and rep.passed, rep.witnesses


@pytest.mark.parametrize("check_id", sorted(REGISTRY))
def test_float_checks_pass_in_three_dimensions(check_id):
    rep = run_check(check_id, FLOAT3)
    assert rep.passed and rep.max_residual <= rep.threshold <= 1e-8


def test_example_diff_shift_degree_eight():
    p = CheckParams(2, F(1, 2), (F(1, 4), F(-1, 2)), degree=8, seed=7, backend="rational", draws=10)
    rep = run_check("prop_diff_shift_1", p)
    assert rep.max_residual == 0 and rep.passed


def test_example_forms_agree_float():
    p = CheckParams(3, -0.5, (0.5, 0.0, 1.5), degree=6, seed=1, backend="float", draws=20)
    rep = run_check("eq_L_forms_agree", p)
    assert rep.threshold == 1e-10 and rep.passed


def test_seed_stability():
    a = reports_to_json(run_all(FLOAT3, ["prop_flip_1", "markov", "weak_SL"]))
    b = reports_to_json(run_all(FLOAT3, ["prop_flip_1", "markov", "weak_SL"]))
    assert a == b
    c = reports_to_json(run_all(CheckParams(3, -0.5, (0.5, 0.0, 1.5), 6, 8, "float", 6), ["weak_SL"]))
    assert json.loads(c)[0]["max_residual"] != json.loads(a)[2]["max_residual"]


def test_report_schema():
    reps = run_all(RATIONAL, ["hadamard_H0"])
    doc = json.loads(reports_to_json(reps))
    assert set(doc[0]) == {"check_id", "params", "max_residual", "threshold", "pass"}
    assert doc[0]["params"]["seed"] == 7 and doc[0]["params"]["backend"] == "rational"


def test_errors():
    with pytest.raises(KeyError):
        run_check("prop_unknown", RATIONAL)
    # basis-using checks need two extra degrees of headroom below the trust cap
    with pytest.raises(ValueError):
        run_check("prop_id_shift_4", CheckParams(2, F(0), (F(0), F(0)), degree=9, backend="rational"))
    with pytest.raises(ValueError):
        run_check("prop_flip_1", CheckParams(2, F(0), (F(0), F(0)), degree=11, backend="rational"))
    with pytest.raises(ValueError):
        run_check("prop_id_shift_4", CheckParams(2, 0.0, (0.0, 0.0), degree=15, backend="float"))


def test_run_all_reports_errors_without_raising():
    reps = run_all(CheckParams(2, F(0), (F(0), F(0)), degree=9, backend="rational", draws=2),
                   ["prop_id_shift_4", "hadamard_H0"])
    assert len(reps) == 2 and not all_passed(reps)
    assert reps[0].error and not reps[0].passed
    assert reps[1].passed


def test_failed_report_keeps_witnesses():
    rep = CheckReport("x", {}, 1.0, 0.0, False, [{"case": "main"}])
    assert rep.to_dict()["pass"] is False


def test_corner_weights():
    labels = [lab for lab, _ in corner_weights(RATIONAL.weight())]
    assert labels[0] == "main"
    ws = dict(corner_weights(RATIONAL.weight()))
    assert all(g == 0 for g in ws["gamma=0"].gamma)
    assert sum(1 for g in ws["single-gamma"].gamma if g) == 1
    assert ws["d=1"].d == 1
