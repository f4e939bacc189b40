"""Throw balls into a stick-breaking sieve and count occupied boxes.

The sieve splits the unit interval by iid fractions W_k; box k keeps the
share P_k = W_1...W_{k-1}(1-W_k).  With n balls dropped uniformly, K_n
boxes end up occupied, the last occupied box has index I_n, and
L_n = I_n - K_n boxes below it stay empty.

For W uniform (the law `beta:1`) the occupancy law is the Ewens/GEM
partition with theta = 1, so E K_n = sum_{i<n} 1/(1+i) exactly.
"""

import numpy as np

from bernoulli_sieve import parse_law, simulate_occupancy_fixed
from bernoulli_sieve.processes import occupancy_fixed_chunk

rng = np.random.default_rng(2024)
spec = parse_law("beta:1")

print("five single realizations at n = 1000:")
for _ in range(5):
    r = simulate_occupancy_fixed(spec, 1000, rng)
    print(f"  K={r.K:3d}  I={r.I:3d}  L={r.L:2d}  (boxes generated: {r.boxes_generated})")

n = 10 ** 4
reps = 20000
K, I, L = occupancy_fixed_chunk(spec, n, rng, reps)
oracle = float(np.sum(1.0 / (1.0 + np.arange(n))))
print(f"\nmean K over {reps} replicates at n={n}: {K.mean():.4f}")
print(f"Ewens oracle sum 1/(1+i):               {oracle:.4f}")
print(f"mean L (limit nu/mu = 1 for beta:1):    {L.mean():.4f}")
