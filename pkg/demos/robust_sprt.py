"""Sequential hypothesis testing when the prior is only known to lie in an interval.

Compares the robust posterior thresholds with the classical single-prior
SPRT.  With equal stakes the robust rule stops earlier at both ends.
"""
from robustlearn import Problem, bayesian_sprt, classify, region_report, StoppingPolicy

beta, a, b = 1.0, 1.0, 1.0
print(f"{'c_hat':>6} {'prior':>12} {'robust lo':>10} {'bayes lo':>9} {'robust hi':>10} {'bayes hi':>9}")
for c_hat in (0.05, 0.1, 0.2):
    bt = bayesian_sprt(a, b, c_hat)
    for lo, hi in ((0.5, 0.5), (0.45, 0.55), (0.35, 0.65)):
        th = classify(Problem.hypothesis_test(beta, a, b, lo, hi, c_hat * beta**2 / 2))
        print(f"{c_hat:6.2f} ({lo:.2f},{hi:.2f}) {th.rtl:10.5f} {bt.rBl:9.5f} {th.rtR:10.5f} {bt.rBR:9.5f}")

# unequal stakes: thresholds shift toward the cheaper mistake
prob = Problem.hypothesis_test(1.0, 1.0, 2.0, 0.3, 0.6, 0.05)
pol = StoppingPolicy(prob)
print()
print("a=1, b=2, prior (0.3, 0.6): stopping regions in the signal at t=1")
for row in region_report(pol, 1.0).as_rows():
    print(f"  z = {row['z']:+.4f}: {row['left']} | {row['right']}")
