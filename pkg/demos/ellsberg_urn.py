"""Betting on a colour from an urn of unknown composition.

The decision maker can watch a noisy signal about the urn for a flow cost
before choosing red, blue, or the safe urn.  This walks through how the
width of the prior interval (eps) changes how long it pays to keep learning.
"""
import numpy as np

from robustlearn import ModelParams, analytic_stats, ellsberg_cutoff, ellsberg_zbar, ellsberg_v0

alpha, c = 0.125, 0.01
p = ModelParams.ellsberg(alpha, c)

cut = ellsberg_cutoff(p)
print(f"learning is worth its cost only while eps < {cut:.4f}")
print()
print(f"{'eps':>6} {'zbar':>8} {'E tau':>8} {'P(correct)':>11} {'v0 - 1/2':>10}")
for eps in np.linspace(0.0, 0.06, 13):
    if eps >= cut:
        print(f"{eps:6.3f} {'-':>8} {'0':>8} {'-':>11} {0.0:10.2e}   stop now, take the safe urn")
        continue
    zbar = ellsberg_zbar(eps, p)
    mean, _ = analytic_stats(eps, p)
    _, right = analytic_stats(eps, p, theta=alpha)
    print(f"{eps:6.3f} {zbar:8.4f} {mean:8.4f} {right:11.4f} {ellsberg_v0(eps, p) - 0.5:10.2e}")

# the continuation band widens with ambiguity while the option value shrinks
print()
print(f"at eps=0.04 keep sampling while |Z_t| < {ellsberg_zbar(0.04, p):.4f}")
