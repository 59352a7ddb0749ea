import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import l_mp, lt_mp
from robustlearn import (
    DomainError,
    ModelParams,
    Payoffs,
    PriorInterval,
    boundary_maps,
    indifference,
    l,
    l_hat,
    l_inverse,
    l_prime,
    l_tilde,
    phi,
    posterior,
    posterior_pair,
    z_tilde,
)
from robustlearn.core import l_inverse_logodds, l_of_logodds, signal_for_posterior

probs = st.floats(min_value=1e-6, max_value=1 - 1e-6)
P = ModelParams.ellsberg(0.125, 0.01)


def test_model_params():
    p = ModelParams(0.0, 2.0, 1.5, 0.3)
    assert p.c_hat == pytest.approx(2 * 0.3 * 1.5**2 / 4.0, rel=1e-15)
    for bad in [(1.0, 1.0, 1.0, 1.0), (0.0, 1.0, 0.0, 1.0), (0.0, 1.0, 1.0, -1.0), (0.0, math.nan, 1.0, 1.0)]:
        with pytest.raises(ValueError):
            ModelParams(*bad)


def test_payoff_validation_and_flags():
    with pytest.raises(ValueError):
        Payoffs(1.0, 0.0, 0.0, 0.9, 0.5)  # u00 != u11
    with pytest.raises(ValueError):
        Payoffs(1.0, 1.2, 0.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        Payoffs(1.0, 0.0, 0.0, 1.0, 1.0)
    e = Payoffs.ellsberg(0.125)
    assert e.payoff_symmetry and not e.no_risky_option
    assert e.u01 == 0.375  # wrong-colour bet wins with probability 1/2 - alpha
    t = Payoffs.hypothesis_test(1.0, 2.0)
    assert t.no_risky_option and not t.payoff_symmetry


def test_l_examples():
    assert l(0.5) == 0.0
    assert l(0.3) == pytest.approx(-l(0.7), abs=1e-14)
    assert l(0.9) == pytest.approx(float(l_mp(0.9)), rel=1e-13)
    assert l(0.9) == pytest.approx(13.283338, abs=1e-5)
    assert l_tilde(0.5) == pytest.approx(1.0, abs=1e-15)
    assert l_hat(0.5) == 0.0
    assert l_tilde(0.9) == pytest.approx(float(lt_mp(0.9)), rel=1e-13)
    assert l_tilde(0.9) == pytest.approx(11.197, abs=1e-3)


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.1, 1.5, math.nan])
def test_domain_errors(bad):
    for f in (l, l_tilde, l_hat, l_prime):
        with pytest.raises(DomainError):
            f(bad)
    with pytest.raises(DomainError):
        posterior(bad, 0.0, 0.0, P)


def test_vectorized():
    r = np.linspace(0.05, 0.95, 7)
    assert np.allclose(l(r), [float(l_mp(v)) for v in r], rtol=1e-13, atol=1e-14)


@given(st.floats(min_value=0.5, max_value=1 - 1e-9))
def test_l_antisymmetric(r):
    # 1 - r is exact for r in [1/2, 1), so the mirror point carries no rounding
    assert abs(l(r) + l(1 - r)) <= 1e-12 * max(1.0, abs(l(r)))


@given(probs, probs)
def test_l_increasing(a, b):
    if a < b:
        assert l(a) < l(b)


@given(probs)
def test_l_identity(r):
    lhs = 0.5 * l(r)
    rhs = l_tilde(r) - 1 / (2 * r * (1 - r)) + 1
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


@given(st.floats(min_value=1e-3, max_value=1 - 1e-3))
def test_l_hat_derivative_is_l(r):
    h = 1e-6 * min(r, 1 - r)
    fd = (l_hat(r + h) - l_hat(r - h)) / (2 * h)
    assert fd == pytest.approx(l(r), rel=1e-5, abs=1e-6)


@given(st.floats(min_value=-1e6, max_value=1e6))
def test_l_inverse_roundtrip(y):
    # in log-odds; going through r itself would amplify rounding by l'(r)
    x = l_inverse_logodds(y)
    assert l_of_logodds(x) == pytest.approx(y, rel=1e-12, abs=1e-12)
    r = l_inverse(0.01 * y)
    if 1e-6 < r < 1 - 1e-6:
        assert l(r) == pytest.approx(0.01 * y, rel=1e-9, abs=1e-9)


def test_phi_examples():
    assert phi(0.0, 0.0, P) == 1.0
    assert phi(3.0, 1.0, P) == pytest.approx(phi(0.0, 1.0, P), rel=1e-15)
    assert phi(0.0, 1.0, P) == pytest.approx(math.exp(0.25), rel=1e-14)
    q = ModelParams(0.2, 1.0, 0.7, 0.1)
    t, z = 1.3, 0.4
    want = math.exp((q.theta1 - q.theta0) * z / q.sigma**2 - (q.theta1**2 - q.theta0**2) * t / (2 * q.sigma**2))
    assert phi(t, z, q) == pytest.approx(want, rel=1e-14)


def test_posterior_examples():
    assert posterior(0.5, 0.0, 0.0, P) == 0.5
    # phi = 2 -> odds 0.52/0.48 * 2
    z = math.log(2.0) / P.slope
    assert posterior(0.52, 0.0, z, P) == pytest.approx(0.6842105263157895, rel=1e-14)
    pp = posterior_pair(PriorInterval(0.48, 0.52), 0.0, 0.0, P)
    assert (pp.m_lo_t, pp.m_hi_t) == pytest.approx((0.48, 0.52), abs=1e-15)
    pp = posterior_pair(PriorInterval(0.3, 0.3), 2.0, 0.7, P)
    assert pp.m_lo_t == pp.m_hi_t


def test_posterior_limit():
    prior = PriorInterval.ellsberg(0.04)
    prev = (0.0, 0.0)
    for z in [1, 5, 20, 80, 200]:
        pp = posterior_pair(prior, 0.0, z, P)
        assert pp.m_lo_t > prev[0] and pp.m_hi_t >= prev[1]
        prev = (pp.m_lo_t, pp.m_hi_t)
    assert prev[0] > 1 - 1e-9


@settings(max_examples=200)
@given(probs, probs, st.floats(0, 50), st.floats(-30, 30), probs)
def test_posterior_ordering_and_roundtrip(a, b, t, z, r):
    lo, hi = min(a, b), max(a, b)
    p = ModelParams(-0.3, 0.5, 1.2, 0.1)
    pp = posterior_pair(PriorInterval(lo, hi), t, z, p)
    assert pp.m_lo_t <= pp.m_hi_t
    zz = signal_for_posterior(r, lo, t, p)
    assert posterior(lo, t, zz, p) == pytest.approx(r, rel=1e-10, abs=1e-12)


def test_boundary_maps_ellsberg_closed_form():
    eps = 0.04
    prior = PriorInterval.ellsberg(eps)
    a = 0.125
    for r in [0.3, 0.5288, 0.8]:
        for t in [0.0, 2.0]:
            f_hi, f_lo = boundary_maps(r, t, prior, P)
            want = 1 / (2 * a) * math.log((1 + eps) / (1 - eps) * r / (1 - r))
            assert f_lo == pytest.approx(want, rel=1e-12)
    assert boundary_maps(0.5288, 0.0, prior, P)[1] == pytest.approx(0.78148, abs=1e-4)


@settings(max_examples=100)
@given(st.floats(0.05, 0.45), st.floats(0.0, 0.4), probs, st.floats(0, 10))
def test_f_ineq_equivalence(m_lo, width, r, t):
    prior = PriorInterval(m_lo, m_lo + width)
    pay = Payoffs(2.0, 0.7, 1.1, 2.0, 0.0)
    p = ModelParams(-0.1, 0.6, 1.0, 0.1)
    pt = indifference(prior, pay)
    zt = z_tilde(t, prior, pay, p, pt)
    f_hi, f_lo = boundary_maps(r, t, prior, p)
    if abs(r - pt.pi_hi) > 1e-9:
        assert (f_hi <= zt) == (r <= pt.pi_hi)
    if abs(r - pt.pi_lo) > 1e-9:
        assert (f_lo <= zt) == (r <= pt.pi_lo)


def test_indifference_examples():
    pt = indifference(PriorInterval.ellsberg(0.04), Payoffs.ellsberg(0.125))
    assert (pt.pi_lo, pt.pi_hi) == pytest.approx((0.48, 0.52), abs=1e-12)
    assert z_tilde(3.0, PriorInterval.ellsberg(0.04), Payoffs.ellsberg(0.125), P) == pytest.approx(0.0, abs=1e-10)
    pt = indifference(PriorInterval(0.4, 0.6), Payoffs.hypothesis_test(1.0, 1.0))
    assert (pt.pi_lo, pt.pi_hi) == pytest.approx((0.4, 0.6), abs=1e-12)
    # singleton: Bayesian indifference b / (a + b) ... solve directly
    pay = Payoffs.hypothesis_test(1.0, 3.0)
    pt = indifference(PriorInterval(0.2, 0.2), pay)
    want = (pay.u00 - pay.u10) / (pay.u00 - pay.u10 + pay.u00 - pay.u01)
    assert pt.pi_lo == pytest.approx(want, abs=1e-12) and pt.pi_hi == pytest.approx(pt.pi_lo, abs=1e-12)


@settings(max_examples=150)
@given(st.floats(0.01, 0.9), st.floats(0.0, 0.09), st.floats(0.05, 5), st.floats(0.05, 5))
def test_indifference_invariants(m_lo, width, a, b):
    prior = PriorInterval(m_lo, m_lo + width)
    pay = Payoffs.hypothesis_test(a, b)
    pt = indifference(prior, pay)
    assert pt.pi_lo * pay.u11 + (1 - pt.pi_lo) * pay.u10 == pytest.approx(
        pt.pi_hi * pay.u01 + (1 - pt.pi_hi) * pay.u00, abs=1e-9
    )
    odds = lambda q: q / (1 - q)
    assert odds(pt.pi_lo) / odds(pt.pi_hi) == pytest.approx(odds(prior.m_lo) / odds(prior.m_hi), rel=1e-9)
    if a == b:
        assert pt.pi_lo + pt.pi_hi == pytest.approx(1.0, abs=1e-12)
