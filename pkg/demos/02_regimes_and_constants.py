"""Classify laws of W into the five convergence regimes and print the
centering/scaling constants of the occupancy count.

The tail of xi = |log W| decides everything:

    A  finite variance            -> normal limit
    B  slowly varying trunc. 2nd  -> normal, solver-based scaling
    C  tail index in (1,2)        -> totally skewed alpha-stable
    D  tail index 1               -> 1-stable
    E  tail index in [0,1)        -> Mittag-Leffler, no centering
"""

from bernoulli_sieve import classify_regime, moments, normalization_for, parse_law

LAWS = ["beta:1", "example:0.3", "tsm2", "paretolog:1.5", "paretolog:1", "paretolog:0.5"]

n = 10 ** 6
print(f"constants at n = {n:.0e}\n")
print(f"{'law':14s} {'regime':6s} {'mu':>8s} {'a_n':>10s} {'b_n':>10s}  extras")
for law in LAWS:
    spec = parse_law(law)
    regime = classify_regime(spec)
    mu = moments(spec).mu
    norm = normalization_for(spec, n)
    extras = {k: round(v, 4) for k, v in norm.to_dict().items()
              if k in ("c_n", "m", "r")}
    print(
        f"{law:14s} {regime.value:6s} {mu:8.4f} {norm.a:10.4f} {norm.b:10.4f}  {extras}"
    )
