"""Checks a closed-form value function against the conditions that make it optimal.

For a problem where the default action is attractive enough to occupy the
middle of the signal range, the value should dominate the stopping payoff,
paste smoothly at every boundary, and solve the HJB equation where sampling
continues.
"""
import numpy as np

from robustlearn import ModelParams, Payoffs, PriorInterval, Problem, build, check_smooth_contact, classify, evaluate, immediate_payoff
from robustlearn.value import variational_residual

prob = Problem(ModelParams(0.0, 1.0, 1.0, 0.05), PriorInterval(0.3, 0.6), Payoffs(1.0, 0.2, 0.2, 1.0, 0.7))
th = classify(prob)
vf = build(th, prob.payoffs, prob.prior, prob.params)
print(f"regime {th.regime.value}, u2** = {th.u2_dstar:.5f}")

for pc in vf.pieces:
    print(f"  {pc.label.value:>8}  x in ({pc.x_lo:+.4f}, {pc.x_hi:+.4f})")

t = 0.5
rep = check_smooth_contact(vf, t=t)
print(f"smooth pasting at t={t}: {'ok' if rep.ok else rep.violations}")
for q in rep.points:
    print(f"  {q['kind']:>12}  z={q['z']:+.4f}  slopes {q['dv_left']:+.6f} {q['dv_right']:+.6f}")

zs = np.linspace(-4, 4, 801) + prob.params.shift * t
gap = evaluate(vf, t, zs) - immediate_payoff(t, zs, prob.payoffs, prob.prior, prob.params)
res = max(abs(variational_residual(vf, t, z)) for z in zs[::10])
print(f"min(v - X) = {gap.min():.2e}, max |variational residual| = {res:.2e}")
