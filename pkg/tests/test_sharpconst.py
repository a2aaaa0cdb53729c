from fractions import Fraction

import numpy as np
import pytest

from rhls import errors
from rhls.sharpconst import (GOLDEN_FIELDS, TrialFamilySpec, c_star_ball, c_star_direct, golden,
                             infimum_search, load_goldens, log_bump, sharp_constant, trial_corpus,
                             trial_function, write_goldens)

TUPLES = [(2, 3, 0), (2, 4, Fraction(1, 2)), (3, 4, 0)]


def test_goldens_present():
    recs = load_goldens()
    for n, a, b in TUPLES:
        rec = recs[(n, float(a), float(b))]
        assert set(rec) == set(GOLDEN_FIELDS)
        assert rec["error_budget"] < 1e-9


@pytest.mark.parametrize("n, alpha, beta", TUPLES)
def test_ball_formula_matches_golden(n, alpha, beta):
    g = golden(n, alpha, beta)
    assert c_star_ball(n, alpha, beta) == pytest.approx(g["ball_value"], rel=1e-10)


@pytest.mark.parametrize("n, alpha, beta", TUPLES[:2])
def test_direct_matches_golden(n, alpha, beta):
    g = golden(n, alpha, beta)
    assert c_star_direct(n, alpha, beta) == pytest.approx(g["direct_value"], rel=1e-9)


def test_direct_independent_of_lambda():
    assert c_star_direct(2, 3, 0, lam=1.0) == pytest.approx(c_star_direct(2, 3, 0, lam=4.0), rel=1e-9)


def test_sharp_constant_result():
    res = sharp_constant(2, 3, 0)
    assert res.relative_gap < 1e-9
    _, parts = c_star_direct(2, 3, 0, details=True)
    assert parts["f_norm"] == pytest.approx(parts["f_norm_closed_form"], rel=1e-9)


def test_golden_round_trip(tmp_path):
    rec = {"ball_value": 0.1234567890123456, "direct_value": 0.2, "error_budget": 1e-12,
           "oracle_config_hash": "abc"}
    path = tmp_path / "g.txt"
    write_goldens({(2, 3.0, 0.5): rec}, path)
    back = load_goldens(path)[(2, 3.0, 0.5)]
    assert back["oracle_config_hash"] == "abc"
    assert back["ball_value"] == pytest.approx(rec["ball_value"], abs=1e-15)


def test_inadmissible_tuple():
    with pytest.raises(errors.NotAdmissible):
        c_star_ball(2, 3, 1)


def test_log_bump():
    psi = log_bump(1.0, 0.5)
    assert psi(np.array([1.0]))[0] == pytest.approx(1.0)
    assert psi(np.array([0.0, np.exp(0.5), 10.0])).tolist() == [0.0, 0.0, 0.0]


def test_trial_positivity_guard():
    with pytest.raises(errors.PositivityViolated):
        trial_function(2, 3, TrialFamilySpec(), (-1.5, 0.0, 0.0))


def test_trial_corpus_size():
    corpus = trial_corpus()
    assert len(corpus) >= 20
    assert len({f.name for f in corpus}) == len(corpus)


def test_search_without_bumps_is_bubble():
    best, info = infimum_search(2, 3, 0, TrialFamilySpec(m=0))
    assert best == pytest.approx(golden(2, 3, 0)["ball_value"], rel=1e-9)
    assert info["eps"] == []
