"""Piecewise closed-form value function and its numerical verification.

On a continuation piece the value is ``g(y) = c_hat * l^(y) + C y + C'`` with
``y`` the posterior the worst-case prior selects there (upper posterior to the
left of the switch signal, lower posterior to the right).  Stopping pieces are
the linear worst-case payoffs or the constant default payoff.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .core import ModelParams, Payoffs, PriorInterval, Problem, l, l_hat, l_tilde
from .errors import CaseMismatch, RegionError
from .policy import Decision, immediate_payoff, layout, x_upper
from .thresholds import Case, Thresholds, classify, solve_rbar, solve_rhat


@dataclass(frozen=True)
class Piece:
    """One region of the value function on ``[x_lo, x_hi]`` in shifted signal."""

    label: Decision
    x_lo: float
    x_hi: float
    side: str = ""  # "hi" or "lo": posterior fed to a continuation piece
    C: float = 0.0
    C_prime: float = 0.0


@dataclass(frozen=True)
class ValueFunction:
    case_tag: Case
    regime: Case
    constants: dict
    pieces: tuple
    switch_x: float
    params: ModelParams
    prior: PriorInterval
    payoffs: Payoffs
    breakpoints: tuple = field(default=())

    def posterior_hi(self, x):
        return expit(self.prior.logit_hi + self.params.slope * np.asarray(x, dtype=float))

    def posterior_lo(self, x):
        return expit(self.prior.logit_lo + self.params.slope * np.asarray(x, dtype=float))

    def piece_value(self, piece: Piece, x):
        """Analytic formula of ``piece`` at ``x``, also outside its own region."""
        x = np.asarray(x, dtype=float)
        pay = self.payoffs
        if piece.label is Decision.STOP_A0:
            return pay.payoff_a0(self.posterior_hi(x))
        if piece.label is Decision.STOP_A1:
            return pay.payoff_a1(self.posterior_lo(x))
        if piece.label is Decision.STOP_A2:
            return np.full_like(x, pay.u2)
        y = self.posterior_hi(x) if piece.side == "hi" else self.posterior_lo(x)
        return g(y, piece.C, piece.C_prime, self.params.c_hat)

    def locate(self, x):
        """Index of the piece holding each ``x``; boundary points go to the stopping piece."""
        x = np.asarray(x, dtype=float)
        bps = np.array([pc.x_hi for pc in self.pieces[:-1]])
        idx = np.searchsorted(bps, x, side="left")
        # x == bp resolves left by default; move to the right neighbour if that one stops
        at_bp = (idx < len(bps)) & (x == bps[np.minimum(idx, len(bps) - 1)])
        for j, pc in enumerate(self.pieces[:-1]):
            if pc.label is Decision.CONTINUE and self.pieces[j + 1].label.is_stop:
                idx = np.where(at_bp & (idx == j), j + 1, idx)
        return idx

    def value_x(self, x):
        x = np.asarray(x, dtype=float)
        idx = self.locate(x)
        out = np.empty_like(x)
        for j, pc in enumerate(self.pieces):
            m = idx == j
            if np.any(m):
                out[m] = self.piece_value(pc, x[m])
        return out


def g(y, C, C_prime, c_hat):
    """Continuation solution ``c_hat (2y-1) log(y/(1-y)) + C y + C'``."""
    return c_hat * l_hat(y) + C * y + C_prime


def build(th: Thresholds, payoffs: Payoffs, prior: PriorInterval, p: ModelParams, expect=None) -> ValueFunction:
    """Assemble the value function for the regime of ``th``.

    ``expect`` optionally names the regime the caller requires; a mismatch
    raises :class:`CaseMismatch`.
    """
    if expect is not None and Case(expect) is not th.regime:
        raise CaseMismatch(f"thresholds are {th.regime.value}, expected {Case(expect).value}")
    ch = p.c_hat
    pay = payoffs
    bps, labels = layout(th, prior, p)
    edges = [-math.inf, *bps.tolist(), math.inf]
    consts = {}

    if th.regime is Case.AII:
        consts["C1"] = -ch * l(th.pi_hi)
        consts["C2"] = pay.gain0 * (1 - th.rl) + pay.u01 - ch * (l_hat(th.rl) - l(th.pi_hi) * th.rl)
        consts["C3"] = -ch * l(th.pi_lo)
        consts["C4"] = pay.gain1 * th.rR + pay.u10 - ch * (l_hat(th.rR) - l(th.pi_lo) * th.rR)
        left, right = ("C1", "C2"), ("C3", "C4")
    elif th.regime is Case.AI:
        consts["C5"] = -ch * l(th.r1l)
        consts["C6"] = pay.u2 - ch * (l_hat(th.r1l) - l(th.r1l) * th.r1l)
        consts["C7"] = -ch * l(th.r1R)
        consts["C8"] = pay.u2 - ch * (l_hat(th.r1R) - l(th.r1R) * th.r1R)
        left, right = ("C5", "C6"), ("C7", "C8")
    elif th.regime is Case.B:
        consts["C9"] = -ch * l(th.rtR) + pay.gain1
        consts["C10"] = pay.u10 - ch * (1 - l_tilde(th.rtR))
        consts["C11"] = -ch * l(th.rtl) - pay.gain0
        consts["C12"] = pay.u00 - ch * (1 - l_tilde(th.rtl))
        # fitted at rtl -> left piece (upper posterior); at rtR -> right piece
        left, right = ("C11", "C12"), ("C9", "C10")
    else:
        raise CaseMismatch(f"no value function for regime {th.regime}")

    switch_x = x_upper(th.switch_hi, prior, p)
    pieces = []
    for j, lab in enumerate(labels):
        lo, hi = edges[j], edges[j + 1]
        if lab is not Decision.CONTINUE:
            pieces.append(Piece(lab, lo, hi))
        elif th.regime is Case.AI:
            names = left if j == 1 else right
            pieces.append(Piece(lab, lo, hi, "hi" if j == 1 else "lo", consts[names[0]], consts[names[1]]))
        else:
            pieces.append(Piece(lab, lo, switch_x, "hi", consts[left[0]], consts[left[1]]))
            pieces.append(Piece(lab, switch_x, hi, "lo", consts[right[0]], consts[right[1]]))
    return ValueFunction(th.case_tag, th.regime, consts, tuple(pieces), switch_x, p, prior, pay, tuple(bps.tolist()))


def build_problem(problem: Problem, expect=None) -> ValueFunction:
    th = classify(problem)
    return build(th, problem.payoffs, problem.prior, problem.params, expect=expect)


def evaluate(vf: ValueFunction, t, z):
    """Value at ``(t, z)``; vectorized over broadcastable arrays."""
    x = np.asarray(z, dtype=float) - vf.params.shift * np.asarray(t, dtype=float)
    out = vf.value_x(x)
    return float(out) if np.ndim(out) == 0 else out


def ellsberg_v0(eps, p: ModelParams):
    """Closed-form time-0 value of the Ellsberg problem."""
    alpha = p.theta1
    if 0.5 * (1 + eps) >= solve_rhat(p):
        return 0.5
    rbar = solve_rbar(eps, p)
    gap = 1.0 / (rbar * (1 - rbar)) - 4.0 / ((1 + eps) * (1 - eps))
    return 0.5 + p.c * p.sigma**2 / (4 * alpha**2) * gap


# -- verification ---------------------------------------------------------


@dataclass
class ContactReport:
    t: float
    points: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


def _one_sided(f, x, h, direction):
    # second-order one-sided difference
    if direction < 0:
        return (3 * f(x) - 4 * f(x - h) + f(x - 2 * h)) / (2 * h)
    return (-3 * f(x) + 4 * f(x + h) - f(x + 2 * h)) / (2 * h)


def check_smooth_contact(vf: ValueFunction, t=0.0, tol=1e-6, h=1e-5, value_tol=1e-9) -> ContactReport:
    """Finite-difference check of value matching, C1 pasting and the continuation ODE.

    Derivatives are in ``z``.  Every internal boundary (stopping boundaries and
    the switch signal) is examined with each side's own analytic formula.
    Never raises; problems are returned as violation strings.
    """
    rep = ContactReport(float(t))
    shift = vf.params.shift * t
    for a, b in zip(vf.pieces[:-1], vf.pieces[1:]):
        x = a.x_hi
        if not math.isfinite(x):
            continue
        try:
            fa = lambda s, pc=a: float(vf.piece_value(pc, s))
            fb = lambda s, pc=b: float(vf.piece_value(pc, s))
            va, vb = fa(x), fb(x)
            da, db = _one_sided(fa, x, h, -1), _one_sided(fb, x, h, +1)
        except Exception as exc:  # report, never raise
            rep.violations.append(f"evaluation failed at z={x + shift}: {exc}")
            continue
        kind = "switch" if a.label is b.label else f"{a.label.value}|{b.label.value}"
        rep.points.append({"z": x + shift, "kind": kind, "v_left": va, "v_right": vb, "dv_left": da, "dv_right": db})
        if abs(va - vb) > value_tol:
            rep.violations.append(f"value jump {va - vb:.3e} at z={x + shift} ({kind})")
        if abs(da - db) > tol:
            rep.violations.append(f"slope jump {da - db:.3e} at z={x + shift} ({kind})")

    ch = vf.params.c_hat
    for pc in vf.pieces:
        if pc.label is not Decision.CONTINUE:
            continue
        lo, hi = pc.x_lo, pc.x_hi
        for frac in (0.25, 0.5, 0.75):
            x = lo + frac * (hi - lo)
            y = float(vf.posterior_hi(x) if pc.side == "hi" else vf.posterior_lo(x))
            hy = 1e-4 * min(y, 1 - y)
            gy = lambda s: g(s, pc.C, pc.C_prime, ch)
            vyy = (gy(y + hy) - 2 * gy(y) + gy(y - hy)) / hy**2
            want = ch / (y * (1 - y)) ** 2
            if abs(vyy - want) > 1e-5 * max(1.0, want):
                rep.violations.append(f"continuation ODE off by {vyy - want:.3e} at y={y}")
    return rep


def worst_case_drift(vf: ValueFunction, x):
    """Drift of the signal under the worst-case prior at shifted signal ``x``."""
    p = vf.params
    m = np.where(np.asarray(x) < vf.switch_x, vf.posterior_hi(x), vf.posterior_lo(x))
    return p.theta0 + (p.theta1 - p.theta0) * m


def _generator(vf: ValueFunction, t, z, h):
    p = vf.params
    v = lambda tt, zz: evaluate(vf, tt, zz)
    v0 = v(t, z)
    vz = (v(t, z + h) - v(t, z - h)) / (2 * h)
    vzz = (v(t, z + h) - 2 * v0 + v(t, z - h)) / h**2
    vt = (v(t + h, z) - v(t - h, z)) / (2 * h)
    drift = float(worst_case_drift(vf, z - p.shift * t))
    return -p.c + vt + 0.5 * p.sigma**2 * vzz + drift * vz


def hjb_residual(vf: ValueFunction, t, z, h=1e-4):
    """``-c + v_t + sigma^2 v_zz / 2 + f v_z`` by central differences.

    Only defined in the continuation region; stopping points raise
    :class:`RegionError` (use :func:`variational_residual` there).
    """
    x = z - vf.params.shift * t
    if vf.pieces[int(vf.locate(x))].label.is_stop:
        raise RegionError(f"(t={t}, z={z}) lies in the stopping region")
    return float(_generator(vf, t, z, h))


def variational_residual(vf: ValueFunction, t, z, h=1e-4):
    """``max(X - v, generator residual)``; zero wherever the value function is optimal."""
    X = immediate_payoff(t, z, vf.payoffs, vf.prior, vf.params)
    return max(X - evaluate(vf, t, z), float(_generator(vf, t, z, h)))
