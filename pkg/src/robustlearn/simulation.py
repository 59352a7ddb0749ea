"""Monte Carlo of the signal process under a stopping policy.

Paths are simulated in the shifted signal ``x = z - s t``, where every
stopping boundary is a constant.  Each step is an Euler-Maruyama increment;
with ``bridge=True`` a Brownian-bridge test also catches boundary crossings
that happen between grid points, which removes the first-order bias of
monitoring only at grid times.

Every path draws from its own generator seeded from
``SeedSequence(seed).generate_state(n_paths)[i]``, so a path's outcome depends
only on ``(seed, i)``.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Union

import numba
import numpy as np

from .core import ModelParams, Problem
from .policy import Decision, StoppingPolicy
from .thresholds import Case, ellsberg_zbar


@dataclass(frozen=True)
class TrueTheta:
    """Signals drift at a fixed parameter value."""

    theta: float


@dataclass(frozen=True)
class WorstCase:
    """Signals drift under the worst-case prior (upper posterior left of the switch, lower right)."""


@dataclass(frozen=True)
class SimConfig:
    measure: Union[TrueTheta, WorstCase] = field(default_factory=WorstCase)
    dt: float = 1e-4
    t_max: Optional[float] = None
    n_paths: int = 10_000
    seed: int = 0
    bridge: bool = True

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.t_max is not None and not self.t_max > 0:
            raise ValueError("t_max must be positive")
        if self.n_paths < 1:
            raise ValueError("n_paths must be at least 1")


@dataclass(frozen=True)
class SimStats:
    mean_tau: float
    se_tau: float
    action_frequencies: dict
    correct_rate: float
    se_correct: float
    censored_count: int
    n_paths: int

    def as_dict(self):
        return {
            "mean_tau": self.mean_tau,
            "se_tau": self.se_tau,
            "action_frequencies": dict(self.action_frequencies),
            "correct_rate": self.correct_rate,
            "se_correct": self.se_correct,
            "censored_count": self.censored_count,
            "n_paths": self.n_paths,
        }


@dataclass(frozen=True)
class PathResult:
    tau: float
    action: Optional[int]
    censored: bool
    trace: Optional[np.ndarray] = None  # shifted signal at each grid time


# -- compiled kernel --------------------------------------------------------

_CONT = -1


@numba.njit(cache=True)
def _region(x, bps, labels):
    # closed stopping regions: boundary points stop
    n = bps.shape[0]
    for i in range(n):
        if x < bps[i]:
            return i
        if x == bps[i]:
            if labels[i] != _CONT:
                return i
            return i + 1
    return n


@numba.njit(cache=True)
def _drift(x, mode, theta, shift, th0, dth, lhi, llo, slope, x_sw):
    if mode == 0:
        return theta - shift
    if x < x_sw:
        m = 1.0 / (1.0 + math.exp(-(lhi + slope * x)))
    else:
        m = 1.0 / (1.0 + math.exp(-(llo + slope * x)))
    return th0 + dth * m - shift


@numba.njit(cache=True)
def _path(seed, bps, labels, mode, theta, shift, th0, dth, lhi, llo, slope, x_sw, sigma, dt, n_max, bridge, trace):
    """Return (steps_taken, tau, region_label); region_label -2 marks censoring."""
    np.random.seed(seed)
    x = 0.0
    record = trace.shape[0] > 0
    if record:
        trace[0] = x
    k = _region(x, bps, labels)
    lab = labels[k]
    if lab != _CONT:
        return 0, 0.0, lab
    lo = bps[k - 1] if k > 0 else -np.inf
    hi = bps[k] if k < bps.shape[0] else np.inf
    sd = sigma * math.sqrt(dt)
    near = 25.0 * sigma * sigma * dt
    two_var = 2.0 / (sigma * sigma * dt)
    for i in range(n_max):
        mu = _drift(x, mode, theta, shift, th0, dth, lhi, llo, slope, x_sw)
        xn = x + mu * dt + sd * np.random.standard_normal()
        if record:
            trace[i + 1] = xn
        if xn <= lo:
            return i + 1, (i + 1) * dt, labels[k - 1]
        if xn >= hi:
            return i + 1, (i + 1) * dt, labels[k + 1]
        if bridge:
            a = (x - lo) * (xn - lo)
            b = (hi - x) * (hi - xn)
            if a < near or b < near:
                p_lo = math.exp(-two_var * a)
                p_hi = math.exp(-two_var * b)
                u = np.random.random_sample()
                if u < p_lo:
                    return i + 1, (i + 0.5) * dt, labels[k - 1]
                if u < p_lo + p_hi:
                    return i + 1, (i + 0.5) * dt, labels[k + 1]
        x = xn
    return n_max, n_max * dt, -2


@numba.njit(cache=True)
def _batch(seeds, bps, labels, mode, theta, shift, th0, dth, lhi, llo, slope, x_sw, sigma, dt, n_max, bridge):
    n = seeds.shape[0]
    taus = np.empty(n)
    acts = np.empty(n, dtype=np.int64)
    empty = np.empty(0)
    for j in range(n):
        _, tau, lab = _path(
            seeds[j], bps, labels, mode, theta, shift, th0, dth, lhi, llo, slope, x_sw, sigma, dt, n_max, bridge, empty
        )
        taus[j] = tau
        acts[j] = lab
    return taus, acts


# -- python front end -------------------------------------------------------


def path_seeds(seed, n_paths):
    return np.random.SeedSequence(seed).generate_state(n_paths).astype(np.int64)


def _label_codes(policy: StoppingPolicy):
    return np.array([_CONT if d is Decision.CONTINUE else d.action for d in policy.labels], dtype=np.int64)


def default_t_max(cfg: SimConfig, policy: StoppingPolicy, problem: Problem):
    """50 times the analytic mean when available, else 50 times (half-width / sigma)^2."""
    p = problem.params
    if cfg.t_max is not None:
        return cfg.t_max
    symmetric = math.isclose(problem.prior.m_lo + problem.prior.m_hi, 1.0, rel_tol=0, abs_tol=1e-14)
    if p.is_ellsberg and symmetric and policy.thresholds.regime is Case.AII and isinstance(cfg.measure, TrueTheta):
        try:
            mean, _ = analytic_stats(problem.prior.m_hi * 2 - 1, p, cfg.measure.theta)
            return 50.0 * max(mean, cfg.dt)
        except ValueError:
            pass
    bps = policy.breakpoints
    half = 0.5 * (float(np.max(bps)) - float(np.min(bps)))
    return 50.0 * max(half / p.sigma, math.sqrt(cfg.dt)) ** 2


def _kernel_args(cfg: SimConfig, policy: StoppingPolicy, problem: Problem):
    p, prior = problem.params, problem.prior
    if isinstance(cfg.measure, TrueTheta):
        mode, theta = 0, float(cfg.measure.theta)
    elif isinstance(cfg.measure, WorstCase):
        mode, theta = 1, 0.0
    else:
        raise TypeError(f"unsupported measure {cfg.measure!r}")
    n_max = int(math.ceil(default_t_max(cfg, policy, problem) / cfg.dt))
    return (
        np.ascontiguousarray(policy._padded, dtype=float),
        _label_codes(policy),
        mode,
        theta,
        p.shift,
        p.theta0,
        p.theta1 - p.theta0,
        prior.logit_hi,
        prior.logit_lo,
        p.slope,
        float(policy.switch_x),
        p.sigma,
        cfg.dt,
        n_max,
        bool(cfg.bridge),
    )


def simulate_path(cfg: SimConfig, policy: StoppingPolicy, problem: Problem, index=0, trace=False) -> PathResult:
    """Simulate path number ``index`` of the run described by ``cfg``."""
    seed = int(path_seeds(cfg.seed, index + 1)[index])
    args = _kernel_args(cfg, policy, problem)
    steps, tau, lab = _path(seed, *args, np.empty(0))
    buf = None
    if trace:
        buf = np.empty(steps + 1)
        _path(seed, *args, buf)
    censored = lab == -2
    return PathResult(float(tau), None if censored else int(lab), bool(censored), buf)


def correct_action(measure, p: ModelParams):
    """a1 when the drift is above the midpoint, a0 below, None when undefined."""
    if not isinstance(measure, TrueTheta) or measure.theta == p.shift:
        return None
    return 1 if measure.theta > p.shift else 0


def run(cfg: SimConfig, policy: StoppingPolicy, problem: Problem):
    """Raw per-path ``(tau, action)`` arrays; action -2 marks a censored path."""
    seeds = path_seeds(cfg.seed, cfg.n_paths)
    return _batch(seeds, *_kernel_args(cfg, policy, problem))


def estimate(cfg: SimConfig, policy: StoppingPolicy, problem: Problem) -> SimStats:
    taus, acts = run(cfg, policy, problem)
    return summarize(taus, acts, correct_action(cfg.measure, problem.params))


def summarize(taus, acts, correct=None) -> SimStats:
    done = acts != -2
    n_done = int(done.sum())
    censored = int(acts.size - n_done)
    if censored:
        warnings.warn(f"{censored} of {acts.size} paths hit the horizon without stopping", RuntimeWarning)
    t = taus[done]
    a = acts[done]
    nan = float("nan")
    mean = float(t.mean()) if n_done else nan
    se = float(t.std(ddof=1) / math.sqrt(n_done)) if n_done > 1 else nan
    freqs = {f"a{k}": (float(np.mean(a == k)) if n_done else nan) for k in (0, 1, 2)}
    if correct is None or not n_done:
        rate, se_rate = nan, nan
    else:
        hit = (a == correct).astype(float)
        rate = float(hit.mean())
        se_rate = float(hit.std(ddof=1) / math.sqrt(n_done)) if n_done > 1 else nan
    return SimStats(mean, se, freqs, rate, se_rate, censored, int(acts.size))


def analytic_stats(eps, p: ModelParams, theta=0.0):
    """Closed-form ``(E tau, P(correct action))`` for the Ellsberg problem under drift ``theta``.

    The continuation region is ``|Z| < zbar``, so these are the exit moments
    of a drifted Brownian motion from a symmetric interval.  The correct
    action is undefined at ``theta = 0`` (NaN).
    """
    if not p.is_ellsberg:
        raise ValueError("closed forms need symmetric drifts theta1 == -theta0")
    zbar = ellsberg_zbar(eps, p)
    x = theta * zbar / p.sigma**2
    ratio = 1.0 if x == 0 else math.tanh(x) / x
    mean = (zbar / p.sigma) ** 2 * ratio
    prob = float("nan") if theta == 0 else 1.0 / (1.0 + math.exp(-2.0 * abs(theta) * zbar / p.sigma**2))
    return mean, prob


def write_trace(path, result: PathResult, policy: StoppingPolicy, problem: Problem, dt):
    """Write a path's grid trace as CSV with columns t, z, m_lo, m_hi, decision."""
    from scipy.special import expit

    p, prior = problem.params, problem.prior
    xs = result.trace if result.trace is not None else np.zeros(1)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "z", "m_lo", "m_hi", "decision"])
        for i, x in enumerate(xs):
            t = i * dt
            dec = policy.decide_x(float(x)).value
            m_lo = expit(prior.logit_lo + p.slope * x)
            m_hi = expit(prior.logit_hi + p.slope * x)
            w.writerow([format(t, ".12g"), format(x + p.shift * t, ".12g"), format(m_lo, ".12g"), format(m_hi, ".12g"), dec])
