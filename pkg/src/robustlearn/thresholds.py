"""Critical posterior thresholds of the robust stopping problem.

All two-equation systems are reduced to nested one-dimensional monotone root
finds in log-odds coordinates.  The workhorse identity is

    l~(r) = l(r)/2 + 1/(2 r (1-r)) - 1,    1/(r (1-r)) = 2 + 2 cosh(x),

which turns every ``l~``-difference into ``l``-differences plus ``cosh`` terms.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Optional

from scipy.special import expit, logit

from ._roots import bracket_increasing, find_root
from .core import (
    ModelParams,
    Payoffs,
    PriorInterval,
    Problem,
    indifference,
    l,
    l_inverse,
    l_inverse_logodds,
    l_of_logodds,
    l_tilde,
)
from .errors import BranchError, ExistenceError, UnsupportedConfiguration


class Case(str, enum.Enum):
    NO_LEARN = "NoLearn"
    AI = "CaseAI"
    AII = "CaseAII"
    B = "CaseB"


@dataclass(frozen=True)
class BayesianThresholds:
    rBl: float
    rBR: float


@dataclass(frozen=True)
class Thresholds:
    """Solved thresholds together with the regime whose stopping rule applies.

    ``case_tag`` is ``NoLearn`` when the origin already lies in the stopping
    region; ``regime`` always names the branch (AI, AII or B) that produced the
    thresholds.  ``switch_lo``/``switch_hi`` are the lower/upper posteriors at
    the signal where the worst-case prior flips; they coincide with
    ``pi_lo``/``pi_hi`` in the payoff-symmetric regimes.
    """

    case_tag: Case
    regime: Case
    pi_lo: float
    pi_hi: float
    u2_star: float
    u2_dstar: float
    switch_lo: float
    switch_hi: float
    r1R: Optional[float] = None
    r2R: Optional[float] = None
    r1l: Optional[float] = None
    r2l: Optional[float] = None
    rR: Optional[float] = None
    rl: Optional[float] = None
    rtR: Optional[float] = None
    rtl: Optional[float] = None

    @property
    def lower(self):
        """Threshold on the upper posterior below which a0 is chosen."""
        return {Case.AI: self.r2l, Case.AII: self.rl, Case.B: self.rtl}[self.regime]

    @property
    def upper(self):
        """Threshold on the lower posterior above which a1 is chosen."""
        return {Case.AI: self.r2R, Case.AII: self.rR, Case.B: self.rtR}[self.regime]

    def as_dict(self):
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        out["case_tag"] = self.case_tag.value
        out["regime"] = self.regime.value
        return out


TIE_TOL = 1e-12


def stop_action(th: Thresholds, m_lo_t, m_hi_t):
    """Action index (0, 1, 2) chosen on stopping at posteriors ``(m_lo_t, m_hi_t)``, or None.

    Stopping regions are closed and padded by ``TIE_TOL`` so that exact ties
    survive rounding; a0 and a1 take priority over a2.
    """
    if m_hi_t <= th.lower + TIE_TOL:
        return 0
    if m_lo_t >= th.upper - TIE_TOL:
        return 1
    if th.regime is Case.AI and m_hi_t >= th.r1l - TIE_TOL and m_lo_t <= th.r1R + TIE_TOL:
        return 2
    return None


# -- Ellsberg closed forms -------------------------------------------------


def _ellsberg_alpha(p: ModelParams):
    if not p.is_ellsberg:
        raise ValueError("Ellsberg formulas need theta1 == -theta0")
    return p.theta1


def ellsberg_target(p: ModelParams):
    """2 alpha^3 / (c sigma^2)."""
    alpha = _ellsberg_alpha(p)
    return 2.0 * alpha**3 / (p.c * p.sigma**2)


def solve_rhat(p: ModelParams):
    """Root of ``l(r) = 2 alpha^3/(c sigma^2)`` in (1/2, 1)."""
    return l_inverse(ellsberg_target(p))


def ellsberg_cutoff(p: ModelParams):
    """Ambiguity level at and above which learning is rejected outright."""
    return 2.0 * solve_rhat(p) - 1.0


def solve_rbar(eps, p: ModelParams):
    """Root of ``l(r) + l((1+eps)/2) = 4 alpha^3/(c sigma^2)``; requires (1+eps)/2 < rhat."""
    half = 0.5 * (1.0 + eps)
    if half >= solve_rhat(p):
        raise BranchError(f"eps={eps} is at or beyond the no-learning cutoff")
    return l_inverse(2.0 * ellsberg_target(p) - l(half))


def ellsberg_zbar(eps, p: ModelParams):
    """Half-width of the symmetric continuation interval ``|Z_t| < zbar``."""
    alpha = _ellsberg_alpha(p)
    rbar = solve_rbar(eps, p)
    return p.sigma**2 / (2.0 * alpha) * (math.log((1 + eps) / (1 - eps)) + float(logit(rbar)))


# -- generic contact systems -----------------------------------------------


def _contact_pair(gap_l, gap_lt, bracket=None):
    """Log-odds ``x1 < x2`` with ``l(x2) - l(x1) = gap_l`` and ``l~(x2) - l~(x1) = gap_lt``.

    Requires ``0 < gap_lt < gap_l``.  With ``x2`` eliminated through the first
    equation, the second residual increases strictly in ``x1`` (its derivative
    is ``l'(r1) (r2 - r1)``), running from ``-gap_lt`` to ``gap_l - gap_lt``.
    """
    if not 0.0 < gap_lt < gap_l:
        raise ExistenceError(f"contact system needs 0 < {gap_lt} < {gap_l}")

    def partner(x1):
        return l_inverse_logodds(l_of_logodds(x1) + gap_l)

    def resid(x1):
        return 0.5 * gap_l + math.cosh(partner(x1)) - math.cosh(x1) - gap_lt

    lo, hi = bracket if bracket is not None else bracket_increasing(resid, center=0.0, step=1.0, limit=300.0)
    x1 = find_root(resid, lo, hi)
    return x1, partner(x1)


def solve_case_ai(payoffs: Payoffs, p: ModelParams, prior: Optional[PriorInterval] = None):
    """Return ``(r1R, r2R, r1l, r2l)``.

    ``(r1R, r2R)`` paste the a2 plateau ``u2`` to the a1 payoff line and
    ``(r2l, r1l)`` paste the a0 line to the plateau.  When ``prior`` is given,
    the regime condition ``u2 >= u2**`` is enforced as well.
    """
    ch = p.c_hat
    if prior is not None:
        _, u2_dstar = critical_u2(payoffs, prior, p)
        if payoffs.u2 < u2_dstar:
            raise ExistenceError(f"u2={payoffs.u2} is below u2**={u2_dstar}")
    x1R, x2R = _contact_pair(payoffs.gain1 / ch, (payoffs.u2 - payoffs.u10) / ch)
    x2l, x1l = _contact_pair(payoffs.gain0 / ch, (payoffs.u00 - payoffs.u2) / ch)
    return tuple(float(expit(v)) for v in (x1R, x2R, x1l, x2l))


def solve_case_aii(payoffs: Payoffs, prior: PriorInterval, p: ModelParams, point=None):
    """Return ``(rl, rR)`` pasting each stopping line to a zero-slope point at pi."""
    point = point or indifference(prior, payoffs)
    ch = p.c_hat
    rR = l_inverse(l(point.pi_lo) + payoffs.gain1 / ch)
    rl = l_inverse(l(point.pi_hi) - payoffs.gain0 / ch)
    return rl, rR


def _solve_case_b(payoffs: Payoffs, prior: PriorInterval, p: ModelParams):
    """Thresholds and switch posteriors for the two-action problem.

    The worst-case prior flips where the value function has zero slope in the
    signal.  Parametrize that signal by the log-odds ``u`` of the lower
    posterior there (the upper one sits at ``u + spread``).  Zero slope on both
    sides fixes each stopping threshold through ``l``; matching the two
    values is a residual that increases strictly in ``u``.
    """
    ch = p.c_hat
    spread = prior.logit_hi - prior.logit_lo
    g0, g1 = payoffs.gain0 / ch, payoffs.gain1 / ch
    offset = 0.5 * (payoffs.u10 - payoffs.u01)

    def thresholds_at(u):
        xR = l_inverse_logodds(l_of_logodds(u) + g1)
        xl = l_inverse_logodds(l_of_logodds(u + spread) - g0)
        return xl, xR

    def resid(u):
        xl, xR = thresholds_at(u)
        return offset + ch * (math.cosh(xR) - math.cosh(u) + math.cosh(u + spread) - math.cosh(xl))

    lo, hi = bracket_increasing(resid, center=-0.5 * spread, step=1.0, limit=300.0)
    u = find_root(resid, lo, hi)
    xl, xR = thresholds_at(u)
    return float(expit(xl)), float(expit(xR)), float(expit(u)), float(expit(u + spread))


def solve_case_b(payoffs: Payoffs, prior: PriorInterval, p: ModelParams):
    """Return ``(rtl, rtR)`` for the problem without a useful default action."""
    rtl, rtR, _, _ = _solve_case_b(payoffs, prior, p)
    return rtl, rtR


def solve_case_b_posterior_contact(payoffs: Payoffs, prior: PriorInterval, p: ModelParams):
    """Alternative pair with slopes matched in posterior coordinates at ``(pi_lo, pi_hi)``.

    Solves

        l(R) - l(pi_lo) = l(L) - l(pi_hi) + (u11 - u10 + u00 - u01)/c_hat
        l~(R) - l~(pi_lo) - pi_lo (l(R) - l(pi_lo)) = l~(L) - l~(pi_hi) - pi_hi (l(L) - l(pi_hi))

    by scanning ``L`` down from ``pi_hi``.  It agrees with :func:`solve_case_b`
    under payoff symmetry or a singleton prior; otherwise the resulting value
    function has a kink in the signal at the switch point.
    """
    point = indifference(prior, payoffs)
    ch = p.c_hat
    total = (payoffs.gain0 + payoffs.gain1) / ch
    xlo, xhi = float(logit(point.pi_lo)), float(logit(point.pi_hi))
    l_lo, l_hi = l_of_logodds(xlo), l_of_logodds(xhi)
    lt_lo, lt_hi = l_tilde(point.pi_lo), l_tilde(point.pi_hi)

    def partner(xl):
        return l_inverse_logodds(l_of_logodds(xl) - l_hi + l_lo + total)

    def resid(xl):
        xR = partner(xl)
        dl_R = l_of_logodds(xR) - l_lo
        dl_L = l_of_logodds(xl) - l_hi
        right = xR + math.exp(xR) - lt_lo - point.pi_lo * dl_R
        left = xl + math.exp(xl) - lt_hi - point.pi_hi * dl_L
        return right - left

    hi = xhi - 1e-9
    f_hi = resid(hi)
    step = 0.5
    lo = hi - step
    while (resid(lo) > 0) == (f_hi > 0):
        step *= 2.0
        lo = hi - step
        if step > 300.0:
            raise BranchError("no sign change found below pi_hi")
    xl = find_root(resid, lo, hi)
    return float(expit(xl)), float(expit(partner(xl)))


def bayesian_sprt(a, b, c_hat):
    """Classical single-prior thresholds for accepting H0 (``rBl``) or H1 (``rBR``)."""
    if a <= 0 or b <= 0 or c_hat <= 0:
        raise ValueError("a, b and c_hat must be positive")
    # l-gap (a+b)/c_hat, l~-gap b/c_hat
    x_lo, x_hi = _contact_pair((a + b) / c_hat, b / c_hat)
    return BayesianThresholds(float(expit(x_lo)), float(expit(x_hi)))


def critical_u2(payoffs: Payoffs, prior: PriorInterval, p: ModelParams, point=None):
    """Return ``(u2*, u2**)``.

    ``u2*`` is the height where the default payoff meets the crossing of the
    a0 and a1 payoffs under a single prior.  With an interval of priors the
    worst-case lines cross lower, at ``(u11 - u10) * pi_lo + u10``, so the
    default can be the best immediate action for some ``u2`` below ``u2*``.
    ``u2**`` is the value at the indifference signal when only a0/a1 are used;
    its constant term is the midpoint ``(u00 + u01)/2``.
    """
    pay = payoffs
    u2_star = (pay.u11 * pay.u00 - pay.u10 * pay.u01) / (pay.u00 + pay.u11 - pay.u01 - pay.u10)
    point = point or indifference(prior, pay)
    rl, _ = solve_case_aii(pay, prior, p, point)
    pih = point.pi_hi
    u2_dstar = 0.5 * p.c_hat * (1.0 / (rl * (1 - rl)) - 1.0 / (pih * (1 - pih))) + 0.5 * (pay.u00 + pay.u01)
    return u2_star, u2_dstar


def classify(problem: Problem) -> Thresholds:
    """Solve the thresholds of the branch that applies and tag the case."""
    pay, prior, p = problem.payoffs, problem.prior, problem.params
    point = indifference(prior, pay)
    u2_star, u2_dstar = critical_u2(pay, prior, p, point)
    common = dict(pi_lo=point.pi_lo, pi_hi=point.pi_hi, u2_star=u2_star, u2_dstar=u2_dstar)

    if pay.no_risky_option:
        rtl, rtR, y_lo, y_hi = _solve_case_b(pay, prior, p)
        th = Thresholds(Case.B, Case.B, switch_lo=y_lo, switch_hi=y_hi, rtl=rtl, rtR=rtR, **common)
    elif pay.payoff_symmetry:
        rl, rR = solve_case_aii(pay, prior, p, point)
        sw = dict(switch_lo=point.pi_lo, switch_hi=point.pi_hi)
        th = Thresholds(Case.AII, Case.AII, rl=rl, rR=rR, **sw, **common)
        # ties at u2 == u2** go to the plateau regime (stopping wins)
        tie = 1e-12 * max(1.0, abs(u2_dstar))
        if pay.u2 >= u2_dstar - tie:
            r1R, r2R, r1l, r2l = solve_case_ai(pay, p)
            if r1l <= point.pi_hi + 1e-12:
                th = Thresholds(
                    Case.AI, Case.AI, r1R=r1R, r2R=r2R, r1l=r1l, r2l=r2l, rl=rl, rR=rR, **sw, **common
                )
    else:
        raise UnsupportedConfiguration("payoffs satisfy neither payoff symmetry nor the no-risky-option condition")

    if stop_action(th, prior.m_lo, prior.m_hi) is not None:
        th = replace(th, case_tag=Case.NO_LEARN)
    return th
