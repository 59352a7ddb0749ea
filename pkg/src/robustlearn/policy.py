"""Executable stopping rule built from solved thresholds.

In the shifted signal ``x = z - s t`` (``s`` the drift midpoint) both posterior
log-odds are affine in ``x`` with no time dependence, so every boundary of the
stopping rule is a constant breakpoint in ``x`` and a line of slope ``s`` in
``(t, z)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import logit

from .core import Payoffs, PriorInterval, Problem, ModelParams, posterior
from .thresholds import TIE_TOL, Case, Thresholds, classify, stop_action


class Decision(enum.Enum):
    CONTINUE = "continue"
    STOP_A0 = "a0"
    STOP_A1 = "a1"
    STOP_A2 = "a2"

    @property
    def action(self) -> Optional[int]:
        return _ACTION[self]

    @classmethod
    def stop(cls, action):
        return _STOP[action]

    @property
    def is_stop(self):
        return self is not Decision.CONTINUE


_ACTION = {Decision.CONTINUE: None, Decision.STOP_A0: 0, Decision.STOP_A1: 1, Decision.STOP_A2: 2}
_STOP = {0: Decision.STOP_A0, 1: Decision.STOP_A1, 2: Decision.STOP_A2}


def x_upper(r, prior: PriorInterval, p: ModelParams):
    """Shifted signal at which the upper posterior equals ``r``."""
    return float((logit(r) - prior.logit_hi) / p.slope)


def x_lower(r, prior: PriorInterval, p: ModelParams):
    """Shifted signal at which the lower posterior equals ``r``."""
    return float((logit(r) - prior.logit_lo) / p.slope)


def layout(th: Thresholds, prior: PriorInterval, p: ModelParams, pad=0.0):
    """Breakpoints in ``x`` and the decision on each of the regions they delimit.

    ``pad`` widens the closed stopping regions in posterior space, which is how
    the tie tolerance of :func:`stop_action` is carried over to signal space.
    """
    if th.regime is Case.AI:
        bps = [
            x_upper(th.r2l + pad, prior, p),
            x_upper(th.r1l - pad, prior, p),
            x_lower(th.r1R + pad, prior, p),
            x_lower(th.r2R - pad, prior, p),
        ]
        labels = [Decision.STOP_A0, Decision.CONTINUE, Decision.STOP_A2, Decision.CONTINUE, Decision.STOP_A1]
    else:
        bps = [x_upper(th.lower + pad, prior, p), x_lower(th.upper - pad, prior, p)]
        labels = [Decision.STOP_A0, Decision.CONTINUE, Decision.STOP_A1]
    return np.array(bps), labels


@dataclass(frozen=True)
class RegionReport:
    """Breakpoints in ``z`` at time ``t`` and the decision on each region between them."""

    t: float
    breakpoints: tuple
    labels: tuple

    def as_rows(self):
        rows = []
        for i, z in enumerate(self.breakpoints):
            rows.append({"z": z, "left": self.labels[i].value, "right": self.labels[i + 1].value})
        return rows


class StoppingPolicy:
    """Stopping rule of a solved problem, usable in posterior or signal coordinates."""

    def __init__(self, problem: Problem, thresholds: Optional[Thresholds] = None):
        self.problem = problem
        self.thresholds = thresholds or classify(problem)
        prior, p = problem.prior, problem.params
        self.breakpoints, self.labels = layout(self.thresholds, prior, p)
        self._padded, _ = layout(self.thresholds, prior, p, pad=TIE_TOL)
        # worst-case prior flips from the upper to the lower endpoint here
        self.switch_x = x_upper(self.thresholds.switch_hi, prior, p)

    @property
    def case_tag(self):
        return self.thresholds.case_tag

    def shifted(self, t, z):
        return z - self.problem.params.shift * t

    def decide(self, t, z) -> Decision:
        """Decision from the posterior pair at ``(t, z)``."""
        prior, p = self.problem.prior, self.problem.params
        m_lo = posterior(prior.m_lo, t, z, p)
        m_hi = posterior(prior.m_hi, t, z, p)
        a = stop_action(self.thresholds, m_lo, m_hi)
        return Decision.CONTINUE if a is None else Decision.stop(a)

    def decide_z(self, t, z) -> Decision:
        """Decision from the boundary lines in signal space."""
        return self.decide_x(self.shifted(t, z))

    def decide_x(self, x) -> Decision:
        bps = self._padded
        if x <= bps[0]:
            return self.labels[0]
        if x >= bps[-1]:
            return self.labels[-1]
        if len(bps) == 4 and bps[1] <= x <= bps[2]:
            return Decision.STOP_A2
        return Decision.CONTINUE

    def continuation_interval(self, x):
        """Open interval of ``x`` around a continuation point, or None if ``x`` stops."""
        if self.decide_x(x).is_stop:
            return None
        i = int(np.searchsorted(self._padded, x))
        return float(self._padded[i - 1]), float(self._padded[i])


def region_report(policy: StoppingPolicy, t) -> RegionReport:
    shift = policy.problem.params.shift * t
    return RegionReport(float(t), tuple(float(b + shift) for b in policy.breakpoints), tuple(policy.labels))


def action_payoffs(t, z, payoffs: Payoffs, prior: PriorInterval, p: ModelParams):
    """Worst-case expected payoffs of a0, a1 and a2 at ``(t, z)``."""
    m_lo = posterior(prior.m_lo, t, z, p)
    m_hi = posterior(prior.m_hi, t, z, p)
    return payoffs.payoff_a0(m_hi), payoffs.payoff_a1(m_lo), payoffs.u2 + 0.0 * np.asarray(m_lo)


def immediate_payoff(t, z, payoffs: Payoffs, prior: PriorInterval, p: ModelParams):
    """Payoff of stopping now with the best action under worst-case beliefs."""
    x0, x1, x2 = action_payoffs(t, z, payoffs, prior, p)
    out = np.maximum(np.maximum(x0, x1), x2)
    return float(out) if np.ndim(out) == 0 else out


def best_action(t, z, payoffs: Payoffs, prior: PriorInterval, p: ModelParams):
    """Index of the action attaining :func:`immediate_payoff` (a0/a1 win ties with a2)."""
    vals = [float(v) for v in action_payoffs(t, z, payoffs, prior, p)]
    best = max(vals)
    for a in (0, 1, 2):
        if vals[a] >= best:
            return a
