"""Robust (maxmin) optimal learning with a two-point parameter and an interval of priors.

Closed-form thresholds and value functions for the stopping problem, an
executable stopping rule, and a Monte Carlo engine to check them.
"""
from .core import (
    IndifferencePoint,
    ModelParams,
    Payoffs,
    PosteriorPair,
    PriorInterval,
    Problem,
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
from .errors import (
    BranchError,
    CaseMismatch,
    ConvergenceError,
    DomainError,
    ExistenceError,
    RegionError,
    UnsupportedConfiguration,
)
from .policy import Decision, StoppingPolicy, best_action, immediate_payoff, region_report
from .simulation import SimConfig, SimStats, TrueTheta, WorstCase, analytic_stats, estimate, simulate_path
from .thresholds import (
    BayesianThresholds,
    Case,
    Thresholds,
    bayesian_sprt,
    classify,
    critical_u2,
    ellsberg_cutoff,
    ellsberg_zbar,
    solve_case_ai,
    solve_case_aii,
    solve_case_b,
    solve_rbar,
    solve_rhat,
)
from .value import ValueFunction, build, check_smooth_contact, ellsberg_v0, evaluate, hjb_residual, variational_residual

__version__ = "0.1.0"
