"""Heavy-tailed sieves: stable and Mittag-Leffler limits.

When |log W| has an infinite-mean tail of index alpha in (0,1), the
occupancy count K_n grows only like log^alpha n and its limit is the
Mittag-Leffler law, identified here by its moment sequence.  For tail
index in (1,2) the fluctuations are alpha-stable; that CDF has no
closed form and is computed by numerically inverting the characteristic
function.
"""

import math

import numpy as np

from bernoulli_sieve import (
    ExperimentPlan,
    LimitLaw,
    ml_moment,
    run_experiment,
)

alpha = 0.5
law = LimitLaw.mittag_leffler(alpha)
print(f"Mittag-Leffler(alpha={alpha}) moments k!/(Gamma^k(1-a) Gamma(1+ak)):")
for k in range(1, 5):
    print(f"  E Z^{k} = {ml_moment(alpha, k):.6f}")

print("\nempirical K_n / log^0.5 n for the index-0.5 law, 4000 replicates:")
for n in (10 ** 3, 10 ** 6, 10 ** 9):
    plan = ExperimentPlan(
        law="paretolog:0.5", target="K_n", size=float(n), replicates=4000,
        seed=11,
    )
    sample = run_experiment(plan)
    scaled = sample.mean / math.sqrt(math.log(n))
    print(f"  n={n:>12,}: {scaled:.4f}  (limit E Z = 2/pi = {2 / math.pi:.4f})")

stable = LimitLaw.stable_c(1.5)
print("\ntotally skewed 1.5-stable CDF via characteristic-function inversion:")
for x in (-4.0, -1.0, 0.0, 1.0, 4.0):
    print(f"  F({x:+.1f}) = {stable.cdf(x):.6f}")
print(f"  F(0) = 1/3 exactly for this skewness: {abs(stable.cdf(0.0) - 1 / 3):.2e}")
