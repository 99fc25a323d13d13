"""Recovering zero coefficients when the covariates themselves are mostly
zero.

Zero-inflated covariates (exact zeros with probability p_zeros) starve the
penalty of information: a column that is usually zero looks a lot like a
coefficient that is zero.  The plain cross-validated fit keeps many spurious
rows alive; the adaptive fit recovers far more of the true zeros.

This is a trimmed version (one shape, two zero levels, few replicates) of
``mladlasso simulate --scenario zeros``.

Run with:  python3 demos/03_zero_inflated_covariates.py
"""

from mladlasso import AdaptiveFitOptions
from mladlasso.sim import ZerosScenario, run_study

scenarios = [
    ZerosScenario(n=100, q=10, p_zeros=pz, error_kind="uniform")
    for pz in (0.1, 0.4)
]

result = run_study(
    "zeros",
    replicates=5,
    seed=0,
    scenarios=scenarios,
    fit_options=AdaptiveFitOptions(folds=5),
)

print("mean % of true-zero coefficient rows recovered (5 replicates):\n")
print(f"{'scenario':<38} {'non-adaptive':>14} {'adaptive':>10}")
by_scenario = {}
for agg in result.aggregates:
    by_scenario.setdefault(agg["scenario_id"], {})[agg["method"]] = agg["mean"]
for sid, means in by_scenario.items():
    print(f"{sid:<38} {means['non_adaptive']:>13.1f}% {means['adaptive']:>9.1f}%")

print("\nthe gap widens as the covariates get sparser (p_zeros 0.1 -> 0.4):")
print("with fewer informative rows per column, unweighted shrinkage cannot")
print("separate small effects from zero ones, while the adaptive weights")
print("push genuine zeros hard toward zero.")
