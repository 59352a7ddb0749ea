"""Closed-form building blocks: model primitives, posterior maps and the ``l`` family.

Everything here is a pure function of its arguments.  Probabilities are
handled internally through log-odds ``x = log(r / (1 - r))``, in which

    l(r)  = 2 (x + sinh x)
    l~(r) = x + e^x
    l^(r) = (2r - 1) x

so the threshold solvers can work on the whole real line without cancellation
near 0 and 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, logit

from ._roots import bracket_increasing, find_root
from .errors import DomainError

PROB_CLAMP = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Signal drifts ``theta0 < theta1``, volatility ``sigma`` and flow cost ``c``."""

    theta0: float
    theta1: float
    sigma: float
    c: float

    def __post_init__(self):
        vals = (self.theta0, self.theta1, self.sigma, self.c)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"parameters must be finite, got {vals}")
        if not self.theta0 < self.theta1:
            raise ValueError("theta0 must be smaller than theta1")
        if self.sigma <= 0 or self.c <= 0:
            raise ValueError("sigma and c must be positive")

    @classmethod
    def ellsberg(cls, alpha, c, sigma=1.0):
        if not 0 < alpha < 0.5:
            raise ValueError("alpha must lie in (0, 1/2)")
        return cls(-alpha, alpha, sigma, c)

    @property
    def c_hat(self):
        """Normalized sampling cost 2 c sigma^2 / (theta1 - theta0)^2."""
        return 2.0 * self.c * self.sigma**2 / (self.theta1 - self.theta0) ** 2

    @property
    def slope(self):
        """Log-likelihood-ratio sensitivity (theta1 - theta0) / sigma^2."""
        return (self.theta1 - self.theta0) / self.sigma**2

    @property
    def shift(self):
        """Drift midpoint; boundaries in z move with slope (theta0 + theta1) / 2."""
        return 0.5 * (self.theta0 + self.theta1)

    @property
    def is_ellsberg(self):
        return self.theta0 == -self.theta1


@dataclass(frozen=True)
class PriorInterval:
    """Interval ``[m_lo, m_hi]`` of prior probabilities on ``theta1``."""

    m_lo: float
    m_hi: float

    def __post_init__(self):
        if not 0 < self.m_lo <= self.m_hi < 1:
            raise ValueError(f"need 0 < m_lo <= m_hi < 1, got ({self.m_lo}, {self.m_hi})")

    @classmethod
    def ellsberg(cls, eps):
        if not 0 <= eps < 1:
            raise ValueError("eps must lie in [0, 1)")
        return cls(0.5 * (1 - eps), 0.5 * (1 + eps))

    @property
    def logit_lo(self):
        return float(logit(self.m_lo))

    @property
    def logit_hi(self):
        return float(logit(self.m_hi))

    @property
    def is_singleton(self):
        return self.m_lo == self.m_hi


@dataclass(frozen=True)
class PosteriorPair:
    m_lo_t: float
    m_hi_t: float
    t: float
    z: float


@dataclass(frozen=True)
class Payoffs:
    """Payoff table ``u_ij = u(a_i, theta_j)`` and the default payoff ``u2``."""

    u00: float
    u01: float
    u10: float
    u11: float
    u2: float

    def __post_init__(self):
        vals = (self.u00, self.u01, self.u10, self.u11, self.u2)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"payoffs must be finite, got {vals}")
        if not math.isclose(self.u00, self.u11, rel_tol=1e-12, abs_tol=1e-15):
            raise ValueError("the correct action must pay the same under both parameters (u00 == u11)")
        if not (self.u00 > self.u01 and self.u00 > self.u10):
            raise ValueError("need u00 > u01 and u00 > u10")
        if not self.u2 < self.u00:
            raise ValueError("need u2 < u00, otherwise a2 is always chosen")

    @classmethod
    def ellsberg(cls, alpha):
        # wrong-colour bet wins with probability 1/2 - alpha
        return cls(0.5 + alpha, 0.5 - alpha, 0.5 - alpha, 0.5 + alpha, 0.5)

    @classmethod
    def hypothesis_test(cls, a, b):
        if a <= 0 or b <= 0:
            raise ValueError("a and b must be positive")
        return cls(a + b, b, a, a + b, 0.0)

    @property
    def payoff_symmetry(self):
        return self.u01 == self.u10

    @property
    def no_risky_option(self):
        return self.u2 <= min(self.u10, self.u01)

    @property
    def gain0(self):
        """u00 - u01: slope magnitude of the a0 payoff in the posterior."""
        return self.u00 - self.u01

    @property
    def gain1(self):
        """u11 - u10: slope of the a1 payoff in the posterior."""
        return self.u11 - self.u10

    def payoff_a0(self, m_hi_t):
        """Worst-case expected payoff of a0 (uses the largest posterior on theta1)."""
        return self.gain0 * (1.0 - m_hi_t) + self.u01

    def payoff_a1(self, m_lo_t):
        """Worst-case expected payoff of a1 (uses the smallest posterior on theta1)."""
        return self.gain1 * m_lo_t + self.u10


@dataclass(frozen=True)
class Problem:
    params: ModelParams
    prior: PriorInterval
    payoffs: Payoffs

    @classmethod
    def ellsberg(cls, alpha, eps, c, sigma=1.0):
        return cls(ModelParams.ellsberg(alpha, c, sigma), PriorInterval.ellsberg(eps), Payoffs.ellsberg(alpha))

    @classmethod
    def hypothesis_test(cls, beta, a, b, m_lo, m_hi, c, sigma=1.0):
        if beta <= 0:
            raise ValueError("beta must be positive")
        return cls(ModelParams(0.0, beta, sigma, c), PriorInterval(m_lo, m_hi), Payoffs.hypothesis_test(a, b))


@dataclass(frozen=True)
class IndifferencePoint:
    """Posterior pair at which a0 and a1 have equal worst-case payoffs."""

    pi_lo: float
    pi_hi: float


def _check_prob(r):
    arr = np.asarray(r, dtype=float)
    if np.any(~((arr > 0) & (arr < 1))):
        raise DomainError("probability argument must lie in the open interval (0, 1)")
    return np.clip(arr, PROB_CLAMP, 1.0 - PROB_CLAMP)


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def l_of_logodds(x):
    return 2.0 * (x + np.sinh(x))


def l_tilde_of_logodds(x):
    return x + np.exp(x)


def l(r):
    """2 log(r/(1-r)) - 1/r + 1/(1-r); strictly increasing from -inf to +inf on (0, 1)."""
    return _out(l_of_logodds(logit(_check_prob(r))))


def l_tilde(r):
    """log(r/(1-r)) + r/(1-r)."""
    return _out(l_tilde_of_logodds(logit(_check_prob(r))))


def l_hat(r):
    """(2r - 1) log(r/(1-r)); its derivative is ``l``."""
    r = _check_prob(r)
    return _out((2.0 * r - 1.0) * logit(r))


def l_prime(r):
    """Derivative of ``l``: 1 / (r^2 (1-r)^2)."""
    r = _check_prob(r)
    return _out(1.0 / (r * (1.0 - r)) ** 2)


def l_inverse_logodds(y):
    """Log-odds ``x`` with ``l = y``, i.e. the root of ``x + sinh x = y/2``."""
    y = float(y)
    if not math.isfinite(y):
        raise DomainError("l is only inverted at finite values")
    if y == 0.0:
        return 0.0
    half = 0.5 * abs(y)
    if half < 1e-6:
        # 2x + x^3/6 = half; the series is exact to rounding here
        x = 0.5 * half
        return math.copysign(x - x**3 / 12.0, y)
    hi = min(0.5 * half, math.asinh(half))
    x = find_root(
        lambda v: v + math.sinh(v) - half,
        0.0,
        hi,
        fprime=lambda v: 1.0 + math.cosh(v),
        xtol=1e-15,
        ftol=1e-13 * max(1.0, half),
    )
    return math.copysign(x, y)


def l_inverse(y):
    """Probability ``r`` with ``l(r) = y``."""
    return float(expit(l_inverse_logodds(y)))


def phi(t, z, p: ModelParams):
    """Likelihood ratio of theta1 against theta0 after observing ``Z_t = z``."""
    return np.exp(log_phi(t, z, p))


def log_phi(t, z, p: ModelParams):
    return p.slope * (np.asarray(z, dtype=float) - p.shift * np.asarray(t, dtype=float))


def posterior(m0, t, z, p: ModelParams):
    """Posterior probability of theta1 given prior ``m0`` and ``Z_t = z``."""
    m0 = np.asarray(m0, dtype=float)
    if np.any(~((m0 > 0) & (m0 < 1))):
        raise DomainError("prior probability must lie in (0, 1)")
    return _out(expit(logit(m0) + log_phi(t, z, p)))


def posterior_pair(prior: PriorInterval, t, z, p: ModelParams):
    return PosteriorPair(
        float(posterior(prior.m_lo, t, z, p)),
        float(posterior(prior.m_hi, t, z, p)),
        float(t),
        float(z),
    )


def signal_for_posterior(r, m0, t, p: ModelParams):
    """Signal level ``z`` at which prior ``m0`` updates to posterior ``r`` at time ``t``."""
    r = np.asarray(r, dtype=float)
    if np.any(~((r > 0) & (r < 1))):
        raise DomainError("target posterior must lie in (0, 1)")
    return _out(p.shift * np.asarray(t, dtype=float) + (logit(r) - logit(m0)) / p.slope)


def boundary_maps(r, t, prior: PriorInterval, p: ModelParams):
    """Return ``(f_hi, f_lo)``: the signals where the upper / lower posterior equals ``r``."""
    return (
        signal_for_posterior(r, prior.m_hi, t, p),
        signal_for_posterior(r, prior.m_lo, t, p),
    )


def indifference(prior: PriorInterval, payoffs: Payoffs):
    """Solve for the posterior pair at which a0 and a1 are equally attractive.

    Both posteriors lie on one signal trajectory, so their log-odds differ by
    the fixed prior log-odds spread; the payoff gap is monotone in the lower
    log-odds, which is located by bracketed root finding.
    """
    spread = prior.logit_hi - prior.logit_lo
    g0, g1 = payoffs.gain0, payoffs.gain1

    def gap(u):
        return g1 * float(expit(u)) + payoffs.u10 - g0 * float(expit(-u - spread)) - payoffs.u01

    lo, hi = bracket_increasing(gap, center=-0.5 * spread)
    u = find_root(gap, lo, hi)
    return IndifferencePoint(float(expit(u)), float(expit(u + spread)))


def z_tilde(t, prior: PriorInterval, payoffs: Payoffs, p: ModelParams, point=None):
    """Signal trajectory on which a0 and a1 are indifferent under worst-case beliefs."""
    point = point or indifference(prior, payoffs)
    return signal_for_posterior(point.pi_hi, prior.m_hi, t, p)
