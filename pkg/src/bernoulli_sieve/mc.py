"""Deterministic Monte Carlo replication with streaming statistics.

Replicates are processed in fixed chunks of CHUNK; chunk i draws from a
Philox stream seeded by SeedSequence(entropy=seed, spawn_key=(i,)), so
the sample depends only on (plan, seed), never on scheduling or worker
count.  Chunk results are merged in index order with a parallel Welford
update, making outputs byte-identical for any thread count.
"""

from __future__ import annotations

import concurrent.futures
import csv
import functools
import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .distributions import parse_law
from .errors import KindMismatch, SieveError
from .limits import LawKind, LimitLaw, Normalization
from .processes import (
    BINOMIAL_CAP,
    Fixed,
    Poisson,
    conditional_mean_R,
    conditional_variance,
    occupancy_fixed_chunk,
    occupancy_poisson_chunk,
    walk_counts_chunk,
)

__all__ = [
    "CHUNK",
    "TARGETS",
    "ExperimentPlan",
    "EmpiricalSample",
    "run_experiment",
    "ks_distance",
    "ks_two_sample",
    "moment_compare",
    "write_csv",
    "summary_dict",
]

CHUNK = 1024

# targets of one replicate; "size" is n for fixed-ball targets, t for
# poissonized ones, and the walk targets evaluate at x = log(size)
TARGETS = (
    "K_n",
    "I_n",
    "L_n",
    "K_t",
    "rho_star",
    "N_star",
    "cond_var",
    "cond_mean_n",
    "cond_mean_t",
)


@dataclass(frozen=True)
class ExperimentPlan:
    """Everything that determines a Monte Carlo sample, hashable to a
    stable identifier."""

    law: str
    target: str
    size: float
    replicates: int
    seed: int
    eps: float = 1e-9
    normalization: Optional[Normalization] = None

    def __post_init__(self):
        if self.target not in TARGETS:
            raise ValueError(f"unknown target {self.target!r}; one of {TARGETS}")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if not (0 < self.size <= BINOMIAL_CAP):
            raise ValueError(f"size must lie in (0, {BINOMIAL_CAP}]")
        if self.target.endswith("_n") and self.size != int(self.size):
            raise ValueError("fixed-ball targets need an integer size")
        parse_law(self.law)  # validate eagerly

    def to_dict(self) -> dict:
        out = {
            "law": self.law,
            "target": self.target,
            "size": self.size,
            "replicates": self.replicates,
            "seed": self.seed,
            "eps": self.eps,
            "normalization": None
            if self.normalization is None
            else self.normalization.to_dict(),
        }
        return out

    def digest(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()


@dataclass(frozen=True)
class EmpiricalSample:
    """Sorted sample values plus replicate-order arrays and streaming
    moments; `values` are normalized when the plan carried constants."""

    values: np.ndarray
    raw: np.ndarray
    normalized: Optional[np.ndarray]
    count: int
    mean: float
    variance: float
    seed: int
    plan_hash: str

    def __post_init__(self):
        if self.count != len(self.values) or np.any(np.diff(self.values) < 0):
            raise AssertionError("sample values must be sorted, count matching")


@functools.lru_cache(maxsize=32)
def _spec_for(law: str):
    return parse_law(law)


def _chunk_rng(seed: int, chunk_idx: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(chunk_idx,))
    return np.random.Generator(np.random.Philox(ss))


def _chunk_values(
    law: str, target: str, size: float, eps: float, seed: int, chunk_idx: int, m: int
) -> np.ndarray:
    spec = _spec_for(law)
    rng = _chunk_rng(seed, chunk_idx)
    try:
        if target in ("K_n", "I_n", "L_n"):
            K, I, L = occupancy_fixed_chunk(spec, int(size), rng, m)
            out = {"K_n": K, "I_n": I, "L_n": L}[target]
        elif target == "K_t":
            out = occupancy_poisson_chunk(spec, float(size), rng, m, eps)[0]
        elif target in ("rho_star", "N_star"):
            rho, ncount = walk_counts_chunk(spec, math.log(size), rng, m)
            out = rho if target == "rho_star" else ncount
        elif target == "cond_var":
            out = [conditional_variance(spec, float(size), rng, eps) for _ in range(m)]
        elif target == "cond_mean_n":
            mode = Fixed(int(size))
            out = [conditional_mean_R(spec, mode, rng, eps) for _ in range(m)]
        else:
            mode = Poisson(float(size))
            out = [conditional_mean_R(spec, mode, rng, eps) for _ in range(m)]
    except SieveError as exc:
        raise type(exc)(
            f"{exc} (replicates {chunk_idx * CHUNK}..{chunk_idx * CHUNK + m - 1})"
        ) from exc
    return np.asarray(out, dtype=float)


def run_experiment(plan: ExperimentPlan, threads: int = 1) -> EmpiricalSample:
    """Run the plan and collect the sample.

    Worker count only affects wall time; chunk streams and the in-order
    merge make the result bit-identical for any `threads`.
    """
    n_chunks = (plan.replicates + CHUNK - 1) // CHUNK
    sizes = [
        min(CHUNK, plan.replicates - i * CHUNK) for i in range(n_chunks)
    ]
    args = [
        (plan.law, plan.target, plan.size, plan.eps, plan.seed, i, sizes[i])
        for i in range(n_chunks)
    ]
    if threads > 1 and n_chunks > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_chunk_values_star, args))
    else:
        chunks = [_chunk_values(*a) for a in args]
    raw = np.concatenate(chunks)
    norm = plan.normalization
    normalized = None if norm is None else norm.normalize(raw)
    stored = raw if normalized is None else normalized
    mean, var = _streaming_moments(
        [c if norm is None else norm.normalize(c) for c in chunks]
    )
    return EmpiricalSample(
        values=np.sort(stored),
        raw=raw,
        normalized=normalized,
        count=plan.replicates,
        mean=mean,
        variance=var,
        seed=plan.seed,
        plan_hash=plan.digest(),
    )


def _chunk_values_star(args):
    return _chunk_values(*args)


def _streaming_moments(chunks):
    """Welford/Chan merge of per-chunk (count, mean, M2) in chunk order."""
    n_tot, mean, m2 = 0, 0.0, 0.0
    for c in chunks:
        n_c = len(c)
        mean_c = float(np.mean(c))
        m2_c = float(np.sum((c - mean_c) ** 2))
        delta = mean_c - mean
        n_new = n_tot + n_c
        mean += delta * n_c / n_new
        m2 += m2_c + delta * delta * n_tot * n_c / n_new
        n_tot = n_new
    var = m2 / (n_tot - 1) if n_tot > 1 else 0.0
    return mean, var


# ---------------------------------------------------------------------------
# comparisons
# ---------------------------------------------------------------------------

def ks_distance(sample: EmpiricalSample, law: LimitLaw) -> float:
    """Exact one-sample Kolmogorov-Smirnov statistic against a limit law.

    Stable laws are evaluated on a monotone grid and interpolated (each
    Gil-Pelaez call is costly); the interpolation error is far below any
    threshold used on KS scales.
    """
    if law.kind is LawKind.MITTAG_LEFFLER:
        raise KindMismatch("use moment_compare for the Mittag-Leffler law")
    v = sample.values
    if law.kind is LawKind.NORMAL:
        cdf = law.cdf(v)
    else:
        lo, hi = v[0] - 1.0, v[-1] + 1.0
        grid = np.linspace(lo, hi, 1024)
        from scipy.interpolate import PchipInterpolator

        cdf_grid = law.cdf(grid)
        cdf = np.clip(PchipInterpolator(grid, cdf_grid)(v), 0.0, 1.0)
    n = len(v)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n)))


def ks_two_sample(a: EmpiricalSample, b: EmpiricalSample) -> float:
    """Two-sample KS statistic between sorted samples."""
    va, vb = a.values, b.values
    allv = np.concatenate([va, vb])
    cdf_a = np.searchsorted(va, allv, side="right") / len(va)
    cdf_b = np.searchsorted(vb, allv, side="right") / len(vb)
    return float(np.max(np.abs(cdf_a - cdf_b)))


def moment_compare(sample: EmpiricalSample, law: LimitLaw, k_max: int = 4):
    """Empirical vs analytic Mittag-Leffler moments, with relative errors
    and Monte Carlo standard errors."""
    if law.kind is not LawKind.MITTAG_LEFFLER:
        raise KindMismatch("moment_compare is defined for the Mittag-Leffler law")
    if not 1 <= k_max <= 4:
        raise ValueError("k_max must lie in 1..4")
    rows = []
    v = sample.values
    for k in range(1, k_max + 1):
        emp = float(np.mean(v ** k))
        se = float(np.std(v ** k, ddof=1) / math.sqrt(len(v)))
        ana = law.moment(k)
        rows.append(
            {
                "k": k,
                "empirical": emp,
                "analytic": ana,
                "rel_err": emp / ana - 1.0,
                "se": se,
            }
        )
    return rows


# ---------------------------------------------------------------------------
# artifacts
# ---------------------------------------------------------------------------

def write_csv(path_or_file, sample: EmpiricalSample) -> None:
    """Replicate-order CSV with header replicate,raw,normalized."""
    if hasattr(path_or_file, "write"):
        _write_csv_rows(path_or_file, sample)
    else:
        with open(path_or_file, "w", newline="") as fh:
            _write_csv_rows(fh, sample)


def _write_csv_rows(fh, sample):
    writer = csv.writer(fh)
    writer.writerow(["replicate", "raw", "normalized"])
    norm = sample.normalized
    for i, r in enumerate(sample.raw):
        writer.writerow(
            [i, repr(float(r)), "" if norm is None else repr(float(norm[i]))]
        )


def summary_dict(
    plan: ExperimentPlan,
    sample: EmpiricalSample,
    ks: Optional[float] = None,
    moments: Optional[list] = None,
) -> dict:
    """Self-describing JSON summary of one experiment."""
    out = {
        "plan": plan.to_dict(),
        "plan_hash": sample.plan_hash,
        "mean": sample.mean,
        "var": sample.variance,
    }
    if ks is not None:
        out["ks"] = ks
    if moments is not None:
        out["moments"] = moments
    return out
