"""Simulates the optimal learning rule and compares with closed forms.

Run with fewer paths for a quick look; the defaults take about a minute.
"""
import sys

from robustlearn import Problem, SimConfig, StoppingPolicy, TrueTheta, WorstCase, analytic_stats, estimate

n = int(sys.argv[1]) if len(sys.argv) > 1 else 100_000
alpha, eps, c = 0.125, 0.04, 0.01
prob = Problem.ellsberg(alpha, eps, c)
pol = StoppingPolicy(prob)

for label, measure in (("theta = 0", TrueTheta(0.0)), ("theta = alpha", TrueTheta(alpha)), ("worst case", WorstCase())):
    s = estimate(SimConfig(measure, dt=1e-4, n_paths=n, seed=7), pol, prob)
    line = f"{label:>14}: E tau = {s.mean_tau:.4f} +- {s.se_tau:.4f}"
    if isinstance(measure, TrueTheta):
        mean, right = analytic_stats(eps, prob.params, measure.theta)
        line += f"  (closed form {mean:.4f})"
        if measure.theta:
            line += f", correct {s.correct_rate:.4f} +- {s.se_correct:.4f} (closed form {right:.4f})"
    print(line + f", default chosen {s.action_frequencies['a2']:.0%}")
