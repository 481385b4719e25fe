import math

import pytest

import shadowprice as sp


BINOMIAL = {
    "horizon": 1,
    "nodes": [
        {"id": "r", "t": 0, "parent": None, "p": 1.0},
        {"id": "u", "t": 1, "parent": "r", "p": 0.5},
        {"id": "d", "t": 1, "parent": "r", "p": 0.5},
    ],
    "bid": {"r": 1.0, "u": 1.3, "d": 0.8},
    "ask": {"r": 1.04, "u": 1.365, "d": 0.84},
    "utility": {"kind": "log"},
}


def test_solve_and_dual_agree():
    primal = sp.solve(BINOMIAL)
    dual = sp.dual(BINOMIAL)
    assert primal["status"] == "optimal"
    assert abs(dual["value"] + primal["lambda"]) < 1e-6


def test_shadow_certificate_passes():
    cert = sp.shadow(BINOMIAL)
    assert cert["passed"]
    assert abs(cert["gap"]) < 1e-6
    for node, s in cert["s_star"].items():
        assert BINOMIAL["bid"][node] <= s <= BINOMIAL["ask"][node]


def test_example5_candidate_is_rejected():
    model = sp.build_example("example5", n=8, K=6)
    cert = sp.shadow(model, candidate="paper")
    assert not cert["passed"]
    assert cert["frictionless_status"] == "unbounded"
    assert abs(cert["constrained_mu"] - model["expected"]["values"]["lambda"]) < 1e-8


def test_minimax_brackets_lambda():
    rep = sp.minimax(BINOMIAL, s_points=9, gamma_lo=-3, gamma_hi=3, gamma_step=0.01)
    assert rep["supinf"] <= rep["infsup"]
    assert abs(rep["infsup"] - rep["lambda"]) <= rep["tolerance"]


def test_saddle_on_example3():
    rep = sp.saddle(sp.build_example("example3", quad=12))
    assert all(c["passed"] for c in rep["checks"])


def test_conjugate_log():
    # inf_y (-log y + 2y) is attained at y = 1/2
    assert sp.conjugate("log", 0.0, 2.0) == pytest.approx(1.0 + math.log(2.0))


def test_errors_become_value_errors():
    bad = dict(BINOMIAL, bid={"r": 1.0, "u": 1.3})
    with pytest.raises(ValueError, match="'d'"):
        sp.solve(bad)
    with pytest.raises(sp.BudgetExceeded):
        sp.minimax(BINOMIAL, s_points=50, budget=10)
