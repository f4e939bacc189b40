"""Sieve occupancy simulation and perturbed-random-walk functionals.

Two views of the same object:

  * occupancy: n balls (or a unit-rate Poisson stream up to time t) fall
    into boxes with stick-breaking frequencies P_k = W_1...W_{k-1}(1-W_k);
    reported as (K, I, L) = (occupied boxes, last occupied index, empty
    boxes below the last occupied one).
  * walk: S_k = xi_1 + ... + xi_k with perturbed points T_k = S_{k-1} +
    eta_k; functionals rho(x) (walk points <= x, counting S_0 = 0),
    N(x) (perturbed points <= x), the shot noise M(x) and the weighted
    sum R(x).

All series are truncated with explicit a-priori tail bounds, never with
heuristic cutoffs; `eps` is the allowed expected truncation error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .distributions import DistributionSpec
from .errors import BinomialCapExceeded

__all__ = [
    "BINOMIAL_CAP",
    "Fixed",
    "Poisson",
    "OccupancyResult",
    "PathFunctionals",
    "StickBreakingStream",
    "simulate_occupancy_fixed",
    "simulate_occupancy_poisson",
    "occupancy_fixed_chunk",
    "occupancy_poisson_chunk",
    "walk_functionals",
    "walk_counts_chunk",
    "weighted_sum_R",
    "conditional_mean_R",
    "conditional_variance",
]

BINOMIAL_CAP = 10 ** 15
DEFAULT_EPS = 1e-9

# draws are buffered in blocks of this size in the scalar code paths
_BLOCK = 64


@dataclass(frozen=True)
class Fixed:
    """Ball-count mode: exactly n balls."""

    n: int


@dataclass(frozen=True)
class Poisson:
    """Poissonized mode: balls arrive on [0, t] at unit rate."""

    t: float


@dataclass(frozen=True)
class OccupancyResult:
    """(K, I, L) counts from one sieve realization.

    K + L = I always; boxes past I are never generated because they
    cannot change any of the three counts.
    """

    K: int
    I: int
    L: int
    boxes_generated: int
    mode: Union[Fixed, Poisson]

    def __post_init__(self):
        if self.K + self.L != self.I or self.K < 0 or self.L < 0:
            raise AssertionError("inconsistent occupancy counts")


@dataclass(frozen=True)
class PathFunctionals:
    """rho(x), N(x), M(x) and R(r_scale) evaluated on one walk path."""

    x: float
    rho: int
    n_count: int
    m_shot: float
    r_weighted: float
    r_scale: float


class StickBreakingStream:
    """Iterator over stick-breaking frequencies in log space.

    Yields P_k = Q_{k-1} - Q_k = e^{-S_{k-1}} (1 - e^{-xi_k}) one box at
    a time; `log_q` tracks S*_k = -log Q_k, so the residual mass Q_k
    stays available long after e^{-S_k} underflows.
    """

    def __init__(self, spec: DistributionSpec, rng: np.random.Generator):
        self.spec = spec
        self.rng = rng
        self.k = 0
        self.log_q = 0.0
        self._buf = np.empty(0)
        self._pos = 0

    def __iter__(self):
        return self

    def __next__(self) -> float:
        if self._pos >= len(self._buf):
            self._buf, _ = self.spec.sample_xi_eta(self.rng, _BLOCK)
            self._pos = 0
        xi = float(self._buf[self._pos])
        self._pos += 1
        p = math.exp(-self.log_q) * -math.expm1(-xi)
        self.k += 1
        self.log_q += xi
        return p

    @property
    def q(self) -> float:
        """Residual mass Q_k after the boxes yielded so far."""
        return math.exp(-self.log_q)


# ---------------------------------------------------------------------------
# occupancy
# ---------------------------------------------------------------------------

def occupancy_fixed_chunk(spec: DistributionSpec, n: int, rng, m: int):
    """Vectorized fixed-n occupancy over m independent replicates.

    Binomial recursion: r_0 = n and B_k ~ Binomial(r_{k-1}, 1 - W_k),
    valid because 1 - W_k is the conditional hit probability of box k
    for a ball that passed boxes 1..k-1.  Returns int64 arrays (K, I, L).
    """
    n = int(n)
    if not 1 <= n <= BINOMIAL_CAP:
        raise BinomialCapExceeded(
            f"n={n} outside [1, {BINOMIAL_CAP}] (exact binomial sampling cap)"
        )
    r = np.full(m, n, dtype=np.int64)
    K = np.zeros(m, dtype=np.int64)
    I = np.zeros(m, dtype=np.int64)
    idx = np.arange(m)
    k = 0
    while idx.size:
        k += 1
        xi, _ = spec.sample_xi_eta(rng, idx.size)
        b = rng.binomial(r[idx], -np.expm1(-xi))
        hit = b > 0
        K[idx[hit]] += 1
        I[idx[hit]] = k
        r[idx] -= b
        idx = idx[r[idx] > 0]
    return K, I, I - K


def simulate_occupancy_fixed(
    spec: DistributionSpec, n: int, rng: np.random.Generator
) -> OccupancyResult:
    """Exact sample of (K_n, I_n, L_n) by sequential binomial thinning."""
    K, I, L = occupancy_fixed_chunk(spec, n, rng, 1)
    return OccupancyResult(
        K=int(K[0]), I=int(I[0]), L=int(L[0]),
        boxes_generated=int(I[0]), mode=Fixed(int(n)),
    )


def occupancy_poisson_chunk(
    spec: DistributionSpec, t: float, rng, m: int, tail_eps: float = DEFAULT_EPS
):
    """Vectorized poissonized occupancy: box k holds Poisson(t P_k) balls.

    Generation stops once t Q_k < tail_eps; the expected number of
    occupied boxes missed is sum_{j>k} (1 - e^{-t P_j}) <= t Q_k.
    """
    if not (t > 0 and tail_eps > 0):
        raise ValueError("t and tail_eps must be positive")
    s = np.zeros(m)
    K = np.zeros(m, dtype=np.int64)
    I = np.zeros(m, dtype=np.int64)
    boxes = np.zeros(m, dtype=np.int64)
    idx = np.arange(m)
    k = 0
    while idx.size:
        k += 1
        xi, _ = spec.sample_xi_eta(rng, idx.size)
        mass = np.exp(-s[idx]) * -np.expm1(-xi)
        c = rng.poisson(t * mass)
        hit = c > 0
        K[idx[hit]] += 1
        I[idx[hit]] = k
        s[idx] += xi
        boxes[idx] = k
        idx = idx[t * np.exp(-s[idx]) >= tail_eps]
    return K, I, I - K, boxes


def simulate_occupancy_poisson(
    spec: DistributionSpec,
    t: float,
    rng: np.random.Generator,
    tail_eps: float = DEFAULT_EPS,
) -> OccupancyResult:
    """One poissonized realization K(t), I(t), L(t)."""
    K, I, L, boxes = occupancy_poisson_chunk(spec, t, rng, 1, tail_eps)
    return OccupancyResult(
        K=int(K[0]), I=int(I[0]), L=int(L[0]),
        boxes_generated=int(boxes[0]), mode=Poisson(float(t)),
    )


# ---------------------------------------------------------------------------
# walk functionals
# ---------------------------------------------------------------------------

def walk_counts_chunk(spec: DistributionSpec, x: float, rng, m: int):
    """Vectorized (rho(x), N(x)) over m independent walk paths.

    rho counts walk points S_k <= x including S_0 = 0; N counts
    perturbed points T_k = S_{k-1} + eta_k <= x.  A path stops once
    S_k > x: every later S and T exceeds x.
    """
    if x < 0:
        raise ValueError("x must be >= 0")
    s = np.zeros(m)
    rho = np.ones(m, dtype=np.int64)
    ncount = np.zeros(m, dtype=np.int64)
    idx = np.arange(m)
    while idx.size:
        xi, eta = spec.sample_xi_eta(rng, (idx.size, _BLOCK))
        part = s[idx, None] + np.cumsum(xi, axis=1)
        prev = np.concatenate([s[idx, None], part[:, :-1]], axis=1)
        rho[idx] += np.count_nonzero(part <= x, axis=1)
        ncount[idx] += np.count_nonzero(prev + eta <= x, axis=1)
        s[idx] = part[:, -1]
        idx = idx[s[idx] <= x]
    return rho, ncount


def walk_functionals(
    spec: DistributionSpec,
    x: float,
    rng: np.random.Generator,
    r_scale: Optional[float] = None,
    eps: float = DEFAULT_EPS,
) -> PathFunctionals:
    """rho(x), N(x), M(x) and R(r_scale) on a single walk path.

    With r_scale = None the weighted sum is evaluated at e^x, pairing
    R(e^x) with rho(x) on the same path.  M(x) sums F(x - S_k) over the
    rho(x) walk points at or below x, with F the eta distribution
    function.  R is truncated once y e^{-S_k} (1 - E W)^{-1}, an upper
    bound for the expected remaining sum, drops below eps.
    """
    if x < 0:
        raise ValueError("x must be >= 0")
    y = math.exp(x) if r_scale is None else float(r_scale)
    if y < 0 or eps <= 0:
        raise ValueError("r_scale must be >= 0 and eps > 0")
    r_cut = eps * max(1.0 - spec.mean_w, 1e-12)
    s = 0.0
    rho = 1
    ncount = 0
    low_points = [0.0]
    r_sum = 0.0
    done = False
    while not done:
        xi, eta = spec.sample_xi_eta(rng, _BLOCK)
        for xi_i, eta_i in zip(xi, eta):
            t_pt = s + eta_i
            if t_pt <= x:
                ncount += 1
            if y > 0:
                r_sum += -math.expm1(-y * math.exp(-t_pt))
            s += xi_i
            if s <= x:
                rho += 1
                low_points.append(s)
            elif y * math.exp(-s) < r_cut:
                done = True
                break
    m_shot = float(np.sum(1.0 - spec.survival_eta(x - np.asarray(low_points))))
    return PathFunctionals(
        x=float(x), rho=rho, n_count=ncount, m_shot=m_shot,
        r_weighted=r_sum, r_scale=y,
    )


def weighted_sum_R(
    spec: DistributionSpec,
    x: float,
    rng: np.random.Generator,
    eps: float = DEFAULT_EPS,
) -> float:
    """R(x) = sum_k (1 - exp(-x e^{-T_k})) on a fresh walk path.

    Truncated at the first k with x e^{-S_k} / (1 - E W) < eps: each
    remaining term is at most x e^{-T_j} <= x e^{-S_{j-1}}, and the
    expected sum of x e^{-S_j} over j >= k is x e^{-S_k} E W^{j-k}
    summed, i.e. x e^{-S_k} / (1 - E W).
    """
    if x < 0 or eps <= 0:
        raise ValueError("x must be >= 0 and eps > 0")
    if x == 0.0:
        return 0.0
    cut = eps * max(1.0 - spec.mean_w, 1e-12)
    s = 0.0
    total = 0.0
    while True:
        xi, eta = spec.sample_xi_eta(rng, _BLOCK)
        for xi_i, eta_i in zip(xi, eta):
            total += -math.expm1(-x * math.exp(-(s + eta_i)))
            s += xi_i
            if x * math.exp(-s) < cut:
                return total


# ---------------------------------------------------------------------------
# conditional moments of K given the frequencies
# ---------------------------------------------------------------------------

def conditional_mean_R(
    spec: DistributionSpec,
    mode: Union[Fixed, Poisson],
    rng: np.random.Generator,
    eps: float = DEFAULT_EPS,
) -> float:
    """E(K | frequencies) on one frequency realization.

    Fixed(n): sum_k (1 - (1 - P_k)^n); Poisson(t): sum_k (1 - e^{-t P_k}).
    Both tails are bounded by weight * Q_k (weight = n or t), the
    truncation rule.
    """
    if isinstance(mode, Fixed):
        if not 1 <= mode.n <= BINOMIAL_CAP:
            raise BinomialCapExceeded(f"n={mode.n} outside [1, {BINOMIAL_CAP}]")
        weight, fixed = float(mode.n), True
    elif isinstance(mode, Poisson):
        if mode.t <= 0:
            return 0.0
        weight, fixed = float(mode.t), False
    else:
        raise TypeError("mode must be Fixed(n) or Poisson(t)")
    if eps <= 0:
        raise ValueError("eps must be positive")
    stream = StickBreakingStream(spec, rng)
    total = 0.0
    for p in stream:
        if fixed:
            total += -math.expm1(weight * math.log1p(-min(p, 1.0)))
        else:
            total += -math.expm1(-weight * p)
        if weight * stream.q < eps:
            return total


def conditional_variance(
    spec: DistributionSpec,
    t: float,
    rng: np.random.Generator,
    eps: float = DEFAULT_EPS,
) -> float:
    """Var(K(t) | frequencies) = sum_k (e^{-t P_k} - e^{-2 t P_k}).

    Tail past box k is below sum t P_j = t Q_k, the truncation rule.
    """
    if t <= 0 or eps <= 0:
        raise ValueError("t and eps must be positive")
    stream = StickBreakingStream(spec, rng)
    total = 0.0
    for p in stream:
        total += math.exp(-t * p) * -math.expm1(-t * p)
        if t * stream.q < eps:
            return total
