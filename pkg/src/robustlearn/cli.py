"""Command-line front end: ``robustlearn {solve,value,simulate,sweep} --scenario FILE``.

Exit codes: 0 success, 2 bad arguments or scenario, 3 solver failure,
4 more than 0.1% of simulated paths censored.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import replace

import numpy as np

from .core import Payoffs, Problem
from .errors import BranchError, ConvergenceError, DomainError, ExistenceError, UnsupportedConfiguration
from .policy import StoppingPolicy, immediate_payoff, region_report
from .scenario import EllsbergSpec, ScenarioError, TestSpec, load
from .simulation import SimConfig, TrueTheta, WorstCase, analytic_stats, estimate, simulate_path, write_trace
from .thresholds import Case, bayesian_sprt, classify, ellsberg_cutoff, ellsberg_zbar, solve_rhat
from .value import build, evaluate

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_CENSORED = 0, 2, 3, 4
CENSOR_LIMIT = 1e-3
SOLVER_ERRORS = (ConvergenceError, ExistenceError, UnsupportedConfiguration, BranchError, DomainError)


def fmt(x):
    """Round floats to 12 significant digits; NaN and infinities become None."""
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return float(format(x, ".12g")) if math.isfinite(x) else None
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, dict):
        return {k: fmt(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [fmt(v) for v in x]
    return x


def to_json(obj):
    return json.dumps(fmt(obj), indent=2) + "\n"


def to_csv(rows):
    buf = io.StringIO()
    if not rows:
        return ""
    cols = list(rows[0])
    for r in rows[1:]:
        cols += [k for k in r if k not in cols]
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        cells = []
        for k in cols:
            v = fmt(r.get(k))
            cells.append("" if v is None else (format(v, ".12g") if isinstance(v, float) else v))
        w.writerow(cells)
    return buf.getvalue()


def _flatten(d, prefix=""):
    out = {}
    for k, v in d.items():
        if isinstance(v, dict):
            out.update(_flatten(v, f"{prefix}{k}."))
        else:
            out[prefix + k] = v
    return out


# -- reports ----------------------------------------------------------------


def _ellsberg_eps(problem: Problem):
    p, prior = problem.params, problem.prior
    if p.is_ellsberg and math.isclose(prior.m_lo + prior.m_hi, 1.0, rel_tol=0, abs_tol=1e-14):
        return prior.m_hi * 2.0 - 1.0
    return None


def solve_report(problem: Problem):
    th = classify(problem)
    p = problem.params
    policy = StoppingPolicy(problem, th)
    vf = build(th, problem.payoffs, problem.prior, p)
    rep = {
        "case": th.case_tag.value,
        "regime": th.regime.value,
        "c_hat": p.c_hat,
        "thresholds": {k: v for k, v in th.as_dict().items() if k not in ("case_tag", "regime")},
        "boundaries": [dict(row, slope=p.shift) for row in region_report(policy, 0.0).as_rows()],
        "v0": evaluate(vf, 0.0, 0.0),
    }
    eps = _ellsberg_eps(problem)
    if eps is not None and problem.payoffs == Payoffs.ellsberg(p.theta1):
        rep["ellsberg"] = {
            "rhat": solve_rhat(p),
            "cutoff": ellsberg_cutoff(p),
            "zbar": ellsberg_zbar(eps, p) if th.case_tag is not Case.NO_LEARN else None,
        }
    pay = problem.payoffs
    if th.regime is Case.B and pay.u2 == 0.0 and pay.u01 > 0 and pay.u10 > 0 and pay.u00 == pay.u01 + pay.u10:
        bt = bayesian_sprt(pay.u10, pay.u01, p.c_hat)
        rep["bayesian"] = {
            "rBl": bt.rBl,
            "rBR": bt.rBR,
            "robust_inside": bool(th.rtl > bt.rBl and th.rtR < bt.rBR),
        }
    return rep


def value_rows(problem: Problem, spec):
    th = classify(problem)
    p = problem.params
    vf = build(th, problem.payoffs, problem.prior, p)
    policy = StoppingPolicy(problem, th)
    t = spec.t
    z_lo, z_hi = spec.z_min, spec.z_max
    if z_lo is None or z_hi is None:
        bps = np.array(vf.breakpoints) + p.shift * t
        span = max(float(bps.max() - bps.min()), 1e-3)
        z_lo = float(bps.min() - 0.5 * span) if z_lo is None else z_lo
        z_hi = float(bps.max() + 0.5 * span) if z_hi is None else z_hi
    zs = np.linspace(z_lo, z_hi, spec.n)
    v = evaluate(vf, t, zs)
    X = immediate_payoff(t, zs, problem.payoffs, problem.prior, p)
    return [
        {"t": t, "z": float(z), "v": float(vz), "X": float(xz), "decision": policy.decide(t, float(z)).value}
        for z, vz, xz in zip(zs, np.atleast_1d(v), np.atleast_1d(X))
    ]


def sim_config(spec, args=None):
    seed = spec.seed if args is None or args.seed is None else args.seed
    paths = spec.paths if args is None or args.paths is None else args.paths
    dt = spec.dt if args is None or args.dt is None else args.dt
    measure = TrueTheta(spec.theta) if spec.measure == "theta" else WorstCase()
    return SimConfig(measure, dt, spec.t_max, paths, seed, spec.bridge)


def simulate_report(problem: Problem, cfg: SimConfig):
    policy = StoppingPolicy(problem)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        stats = estimate(cfg, policy, problem)
    rep = {"case": policy.case_tag.value, **stats.as_dict()}
    eps = _ellsberg_eps(problem)
    analytic = (None, None)
    if eps is not None and isinstance(cfg.measure, TrueTheta) and policy.case_tag is Case.AII:
        analytic = analytic_stats(eps, problem.params, cfg.measure.theta)
    rep["analytic_mean_tau"], rep["analytic_correct"] = analytic
    return rep, policy


def _with(problem: Problem, fam, parameter, value):
    """Problem with one sweep parameter replaced."""
    if parameter in ("eps", "alpha"):
        if not isinstance(fam, EllsbergSpec):
            raise ScenarioError(f"sweeping {parameter} needs an [ellsberg] scenario")
        return replace(fam, **{parameter: value}).problem()
    if parameter == "c":
        if isinstance(fam, TestSpec):
            return replace(fam, c=value, c_hat=None).problem()
        return replace(fam, c=value).problem()
    pay = problem.payoffs
    return Problem(problem.params, problem.prior, Payoffs(pay.u00, pay.u01, pay.u10, pay.u11, value))


def sweep_rows(sc):
    sw = sc.sweep
    base = sc.problem()
    rows = []
    for val in sw.values:
        row = {sw.parameter: val, "status": "ok"}
        try:
            prob = _with(base, sc.family, sw.parameter, val)
            th = classify(prob)
            vf = build(th, prob.payoffs, prob.prior, prob.params)
            row.update(case=th.case_tag.value, regime=th.regime.value, lower=th.lower, upper=th.upper, u2_dstar=th.u2_dstar)
            row["v0"] = evaluate(vf, 0.0, 0.0)
            eps = _ellsberg_eps(prob)
            zbar = mean = prob_correct = None
            if eps is not None and th.case_tag is Case.AII:
                zbar = ellsberg_zbar(eps, prob.params)
                mean, _ = analytic_stats(eps, prob.params, 0.0)
                _, prob_correct = analytic_stats(eps, prob.params, prob.params.theta1)
            row.update(zbar=zbar, mean_tau=mean, correct_prob=prob_correct)
        except ScenarioError:
            raise
        except (ValueError, ConvergenceError) as exc:
            row["status"] = f"error: {exc}"
        rows.append(row)
    return rows


# -- entry point ------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="robustlearn", description="Robust optimal learning: thresholds, values, simulation.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("solve", "solve thresholds and classify the case"),
        ("value", "tabulate the value function on a z-grid"),
        ("simulate", "Monte Carlo of the stopping rule"),
        ("sweep", "comparative statics over one parameter"),
    ):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--scenario", required=True, help="TOML scenario file")
        sp.add_argument("--out", help="output file (default: [output].path or stdout)")
        sp.add_argument("--seed", type=int, help="override [simulation].seed")
        sp.add_argument("--paths", type=int, help="override [simulation].paths")
        sp.add_argument("--dt", type=float, help="override [simulation].dt")
        sp.add_argument("--format", choices=("json", "csv"), help="output format")
    return ap


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        sc = load(args.scenario)
        if args.seed is not None and args.seed < 0:
            raise ScenarioError("--seed must be non-negative")
        if args.paths is not None and args.paths < 1:
            raise ScenarioError("--paths must be positive")
        if args.dt is not None and not args.dt > 0:
            raise ScenarioError("--dt must be positive")
        if args.command == "sweep" and sc.sweep is None:
            raise ScenarioError("sweep needs a [sweep] table")
        problem = sc.problem()
    except (ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = args.out or sc.output.path
    fmt_ = args.format or sc.output.format

    code = EXIT_OK
    try:
        if args.command == "solve":
            rep = solve_report(problem)
            text = to_csv([_flatten({k: v for k, v in rep.items() if k != "boundaries"})]) if fmt_ == "csv" else to_json(rep)
        elif args.command == "value":
            rows = value_rows(problem, sc.value)
            text = to_json(rows) if fmt_ == "json" else to_csv(rows)
        elif args.command == "simulate":
            cfg = sim_config(sc.simulation, args)
            rep, policy = simulate_report(problem, cfg)
            text = to_csv([_flatten(rep)]) if fmt_ == "csv" else to_json(rep)
            if sc.simulation.trace:
                res = simulate_path(cfg, policy, problem, index=0, trace=True)
                write_trace(sc.simulation.trace, res, policy, problem, cfg.dt)
            if rep["censored_count"] > CENSOR_LIMIT * rep["n_paths"]:
                print(f"error: {rep['censored_count']} of {rep['n_paths']} paths censored", file=sys.stderr)
                code = EXIT_CENSORED
        else:
            rows = sweep_rows(sc)
            text = to_json(rows) if fmt_ == "json" else to_csv(rows)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SOLVER_ERRORS as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    _emit(text, out)
    return code


if __name__ == "__main__":
    sys.exit(main())
