import math

import numpy as np
import pytest

import oracles as orc
from robustlearn import (
    Case,
    CaseMismatch,
    ModelParams,
    Payoffs,
    PriorInterval,
    Problem,
    RegionError,
    boundary_maps,
    build,
    check_smooth_contact,
    classify,
    ellsberg_cutoff,
    ellsberg_v0,
    evaluate,
    hjb_residual,
    immediate_payoff,
    solve_rbar,
    variational_residual,
)
from robustlearn.core import l_hat
from robustlearn.policy import Decision
from robustlearn.value import build_problem
from scenarios import random_problems

P = ModelParams.ellsberg(0.125, 0.01)


def _vf(problem):
    return build(classify(problem), problem.payoffs, problem.prior, problem.params)


def test_ellsberg_v0_example():
    vf = _vf(Problem.ellsberg(0.125, 0.04, 0.01))
    rb = solve_rbar(0.04, P)
    # hand-built closed form
    want = 0.5 + (0.01 / (4 * 0.125**2)) * (1 / (rb * (1 - rb)) - 4 / (1.04 * 0.96))
    assert evaluate(vf, 0.0, 0.0) == pytest.approx(want, abs=1e-12)
    assert evaluate(vf, 0.0, 0.0) - 0.5 == pytest.approx(1.0963776509e-3, rel=1e-8)
    assert ellsberg_v0(0.04, P) == pytest.approx(want, abs=1e-14)


def test_v0_at_cutoff():
    eps = ellsberg_cutoff(P)
    assert evaluate(_vf(Problem.ellsberg(0.125, eps, 0.01)), 0.0, 0.0) == pytest.approx(0.5, abs=1e-12)
    assert evaluate(_vf(Problem.ellsberg(0.125, 0.05, 0.01)), 0.0, 0.0) == 0.5


def test_value_meets_payoff_at_upper_boundary():
    prob = Problem.ellsberg(0.125, 0.04, 0.01)
    th = classify(prob)
    vf = _vf(prob)
    z = boundary_maps(th.rR, 1.7, prob.prior, P)[1]
    assert evaluate(vf, 1.7, z) == pytest.approx(prob.payoffs.gain1 * th.rR + prob.payoffs.u10, abs=1e-12)


def test_deep_stopping_region_is_linear_payoff():
    prob = Problem.hypothesis_test(1.0, 1.0, 2.0, 0.3, 0.6, 0.05)
    vf = _vf(prob)
    for z in (8.0, 20.0, -9.0):
        assert evaluate(vf, 0.5, z) == pytest.approx(immediate_payoff(0.5, z, prob.payoffs, prob.prior, prob.params), abs=1e-14)


def test_case_aii_value_at_indifference_is_u2_dstar():
    prob = Problem(ModelParams(0.2, 1.0, 0.8, 0.04), PriorInterval(0.3, 0.6), Payoffs(1.0, 0.2, 0.2, 1.0, 0.3))
    th = classify(prob)
    assert th.regime is Case.AII
    vf = _vf(prob)
    t = 2.0
    zt = boundary_maps(th.pi_hi, t, prob.prior, prob.params)[0]
    assert evaluate(vf, t, zt) == pytest.approx(th.u2_dstar, abs=1e-12)
    ch = prob.params.c_hat
    g1 = ch * l_hat(th.pi_hi) + vf.constants["C1"] * th.pi_hi + vf.constants["C2"]
    g2 = ch * l_hat(th.pi_lo) + vf.constants["C3"] * th.pi_lo + vf.constants["C4"]
    assert g1 == pytest.approx(th.u2_dstar, abs=1e-12) and g2 == pytest.approx(th.u2_dstar, abs=1e-12)


def test_case_ai_plateau():
    prob = Problem(ModelParams(0.0, 1.0, 1.0, 0.05), PriorInterval(0.3, 0.6), Payoffs(1.0, 0.2, 0.2, 1.0, 0.7))
    th = classify(prob)
    assert th.regime is Case.AI
    vf = _vf(prob)
    a2 = [pc for pc in vf.pieces if pc.label is Decision.STOP_A2][0]
    xs = np.linspace(a2.x_lo, a2.x_hi, 11)
    assert np.all(evaluate(vf, 0.0, xs) == 0.7)


def test_case_mismatch():
    prob = Problem.ellsberg(0.125, 0.04, 0.01)
    with pytest.raises(CaseMismatch):
        build(classify(prob), prob.payoffs, prob.prior, P, expect=Case.B)
    with pytest.raises(CaseMismatch):
        build_problem(prob, expect="CaseAI")
    assert build_problem(prob, expect="CaseAII").regime is Case.AII


def test_case_b_constants_labelled_by_fit_point():
    prob = Problem.hypothesis_test(1.0, 1.0, 2.0, 0.3, 0.6, 0.05)
    th = classify(prob)
    vf = _vf(prob)
    left, right = [pc for pc in vf.pieces if pc.label is Decision.CONTINUE]
    assert (right.C, right.C_prime) == (vf.constants["C9"], vf.constants["C10"])
    assert (left.C, left.C_prime) == (vf.constants["C11"], vf.constants["C12"])
    ch = prob.params.c_hat
    # the right piece meets the a1 payoff at rtR with the a1 slope
    g = lambda y: ch * l_hat(y) + right.C * y + right.C_prime
    assert g(th.rtR) == pytest.approx(prob.payoffs.payoff_a1(th.rtR), abs=1e-12)


def test_smooth_contact_symmetric_aii():
    prob = Problem.ellsberg(0.125, 0.04, 0.01)
    rep = check_smooth_contact(_vf(prob), t=0.0)
    assert rep.ok, rep.violations
    switch = [q for q in rep.points if q["kind"] == "switch"][0]
    assert abs(switch["dv_left"]) < 1e-6 and abs(switch["dv_right"]) < 1e-6
    # smooth fit: slope equals that of the stopping payoff in z
    th = classify(prob)
    upper = [q for q in rep.points if q["kind"] == "continue|a1"][0]
    y = th.rR
    assert upper["dv_left"] == pytest.approx(prob.payoffs.gain1 * y * (1 - y) * P.slope, rel=1e-6)


def test_smooth_contact_reports_not_raises():
    prob = Problem.hypothesis_test(1.0, 1.0, 2.0, 0.3, 0.6, 0.05)
    vf = _vf(prob)
    # perturb a constant: the report must flag it
    pieces = list(vf.pieces)
    i = [k for k, pc in enumerate(pieces) if pc.label is Decision.CONTINUE][0]
    from dataclasses import replace

    pieces[i] = replace(pieces[i], C_prime=pieces[i].C_prime + 1e-3)
    bad = replace(vf, pieces=tuple(pieces))
    rep = check_smooth_contact(bad)
    assert not rep.ok and any("value jump" in v for v in rep.violations)


def test_hjb_region_error():
    prob = Problem.ellsberg(0.125, 0.04, 0.01)
    vf = _vf(prob)
    with pytest.raises(RegionError):
        hjb_residual(vf, 0.0, 2.0)
    assert abs(hjb_residual(vf, 0.0, 0.3)) < 1e-4
    assert abs(variational_residual(vf, 0.0, 2.0)) < 1e-8


@pytest.mark.parametrize("regime", [Case.AI, Case.AII, Case.B])
def test_random_scenarios(regime):
    for prob in random_problems(regime, 4, seed=11):
        vf = _vf(prob)
        for t in (0.0, 1.3):
            rep = check_smooth_contact(vf, t=t)
            assert rep.ok, rep.violations
            bps = np.array(vf.breakpoints)
            zs = np.linspace(bps.min() - 2, bps.max() + 2, 400) + prob.params.shift * t
            v = evaluate(vf, t, zs)
            X = immediate_payoff(t, zs, prob.payoffs, prob.prior, prob.params)
            assert np.all(v >= X - 1e-9)
            for z in zs[::20]:
                assert variational_residual(vf, t, z) <= 1e-6


def test_v0_decreasing_in_eps():
    eps = np.linspace(0, ellsberg_cutoff(P), 30, endpoint=False)
    v = [evaluate(_vf(Problem.ellsberg(0.125, e, 0.01)), 0.0, 0.0) - 0.5 for e in eps]
    assert all(b < a for a, b in zip(v, v[1:]))


@pytest.mark.parametrize(
    "prob",
    [
        Problem(ModelParams(0.0, 1.0, 1.0, 0.05), PriorInterval(0.3, 0.6), Payoffs(1.0, 0.2, 0.2, 1.0, 0.5)),
        Problem(ModelParams(0.0, 1.0, 1.0, 0.05), PriorInterval(0.3, 0.6), Payoffs(1.0, 0.2, 0.2, 1.0, 0.7)),
    ],
    ids=["a.ii", "a.i"],
)
def test_against_robust_hjb_grid(prob):
    pay, prior, p = prob.payoffs, prob.prior, prob.params
    x, v, X = orc.robust_hjb_grid(
        p.theta0, p.theta1, p.sigma, p.c, prior.m_lo, prior.m_hi, pay.u00, pay.u01, pay.u10, pay.u11, pay.u2, -5, 5, 401, tol=1e-11
    )
    mine = evaluate(_vf(prob), 0.0, x)
    inner = slice(40, -40)
    assert np.max(np.abs(mine[inner] - v[inner])) < 2e-3
