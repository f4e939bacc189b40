import json
import math

import numpy as np
import pytest

from bernoulli_sieve import (
    EmpiricalSample,
    ExperimentPlan,
    KindMismatch,
    LimitLaw,
    ks_distance,
    ks_two_sample,
    moment_compare,
    normalization_for,
    parse_law,
    run_experiment,
    summary_dict,
    write_csv,
)


def make_plan(**kw):
    base = dict(
        law="beta:1", target="K_n", size=1000.0, replicates=2000, seed=5
    )
    base.update(kw)
    return ExperimentPlan(**base)


def sample_from_values(values, seed=0):
    values = np.asarray(values, dtype=float)
    return EmpiricalSample(
        values=np.sort(values),
        raw=values,
        normalized=None,
        count=len(values),
        mean=float(np.mean(values)),
        variance=float(np.var(values, ddof=1)) if len(values) > 1 else 0.0,
        seed=seed,
        plan_hash="adhoc",
    )


# ---------------------------------------------------------------------------
# plans
# ---------------------------------------------------------------------------

def test_plan_validation():
    with pytest.raises(ValueError):
        make_plan(replicates=0)
    with pytest.raises(ValueError):
        make_plan(target="bogus")
    with pytest.raises(ValueError):
        make_plan(size=2.5)  # fixed-ball target needs an integer
    with pytest.raises(ValueError):
        make_plan(size=10.0 ** 16)
    make_plan(target="K_t", size=2.5)  # poissonized horizon may be fractional


def test_plan_hash_is_stable_and_sensitive():
    a, b = make_plan(), make_plan()
    assert a.digest() == b.digest()
    assert a.digest() != make_plan(seed=6).digest()


# ---------------------------------------------------------------------------
# engine
# ---------------------------------------------------------------------------

def test_single_replicate_rho_at_zero():
    plan = ExperimentPlan(
        law="beta:1", target="rho_star", size=1.0, replicates=1, seed=3
    )
    sample = run_experiment(plan)
    assert sample.values.tolist() == [1.0]


def test_determinism_across_thread_counts():
    plan = make_plan(replicates=4096)
    s1 = run_experiment(plan, threads=1)
    s4 = run_experiment(plan, threads=4)
    assert s1.raw.tobytes() == s4.raw.tobytes()
    assert s1.values.tobytes() == s4.values.tobytes()
    assert s1.mean == s4.mean and s1.variance == s4.variance


def test_streaming_moments_match_two_pass():
    sample = run_experiment(make_plan(replicates=5000))
    assert sample.mean == pytest.approx(float(np.mean(sample.raw)), rel=1e-12)
    assert sample.variance == pytest.approx(
        float(np.var(sample.raw, ddof=1)), rel=1e-10
    )


def test_ewens_mean_through_engine():
    n = 10 ** 4
    plan = make_plan(size=float(n), replicates=10 ** 4, seed=21)
    sample = run_experiment(plan)
    oracle = float(np.sum(1.0 / (1.0 + np.arange(n))))
    se = math.sqrt(sample.variance / sample.count)
    assert abs(sample.mean - oracle) <= 3.0 * se


def test_normalized_values():
    spec = parse_law("beta:1")
    norm = normalization_for(spec, 10 ** 4)
    plan = make_plan(size=float(10 ** 4), normalization=norm, replicates=3000)
    sample = run_experiment(plan)
    np.testing.assert_allclose(
        sample.normalized, (sample.raw - norm.b) / norm.a, rtol=1e-13
    )
    assert abs(sample.mean) < 1.0  # normalized scale


# ---------------------------------------------------------------------------
# KS and moments
# ---------------------------------------------------------------------------

def test_ks_distance_on_true_law():
    gen = np.random.default_rng(8)
    sample = sample_from_values(gen.standard_normal(10 ** 5))
    # 99th percentile of the Kolmogorov statistic
    assert ks_distance(sample, LimitLaw.normal()) <= 1.63 / math.sqrt(10 ** 5)


def test_ks_degenerate_sample():
    sample = sample_from_values(np.zeros(100))
    assert ks_distance(sample, LimitLaw.normal()) == pytest.approx(0.5)


def test_ks_against_stable_uses_interpolation():
    # stable-c sample built by inverse transform from the law's own CDF
    law = LimitLaw.stable_c(1.5)
    grid = np.linspace(-60.0, 30.0, 4001)
    cdf = law.cdf(grid)
    gen = np.random.default_rng(9)
    draws = np.interp(gen.random(20000), cdf, grid)
    d = ks_distance(sample_from_values(draws), law)
    assert d <= 1.63 / math.sqrt(20000) + 0.003


def test_two_sample_ks():
    gen = np.random.default_rng(10)
    a = sample_from_values(gen.standard_normal(5000))
    b = sample_from_values(gen.standard_normal(5000))
    c = sample_from_values(gen.standard_normal(5000) + 1.0)
    assert ks_two_sample(a, b) < 0.05
    assert ks_two_sample(a, c) > 0.2
    assert ks_two_sample(a, b) == ks_two_sample(b, a)


def test_kind_mismatch_routing():
    ml = LimitLaw.mittag_leffler(0.5)
    sample = sample_from_values(np.random.default_rng(11).random(100))
    with pytest.raises(KindMismatch):
        ks_distance(sample, ml)
    with pytest.raises(KindMismatch):
        moment_compare(sample, LimitLaw.normal())


def test_moment_compare_alpha_zero_is_exponential():
    gen = np.random.default_rng(12)
    sample = sample_from_values(gen.exponential(1.0, 10 ** 5))
    rows = moment_compare(sample, LimitLaw.mittag_leffler(0.0), k_max=2)
    first = rows[0]
    assert first["analytic"] == pytest.approx(1.0)
    assert abs(first["empirical"] - 1.0) <= 3.0 * first["se"]
    with pytest.raises(ValueError):
        moment_compare(sample, LimitLaw.mittag_leffler(0.0), k_max=5)


# ---------------------------------------------------------------------------
# artifacts
# ---------------------------------------------------------------------------

def test_csv_roundtrip(tmp_path):
    plan = make_plan(replicates=50)
    sample = run_experiment(plan)
    path = tmp_path / "out.csv"
    write_csv(path, sample)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "replicate,raw,normalized"
    assert len(lines) == 51
    rows = [line.split(",") for line in lines[1:]]
    np.testing.assert_array_equal(
        [float(r[1]) for r in rows], sample.raw
    )


def test_summary_json_round_trips_plan_hash(tmp_path):
    plan = make_plan(replicates=64)
    sample = run_experiment(plan)
    summary = summary_dict(plan, sample, ks=0.1)
    path = tmp_path / "summary.json"
    path.write_text(json.dumps(summary))
    loaded = json.loads(path.read_text())
    rebuilt = ExperimentPlan(
        law=loaded["plan"]["law"],
        target=loaded["plan"]["target"],
        size=loaded["plan"]["size"],
        replicates=loaded["plan"]["replicates"],
        seed=loaded["plan"]["seed"],
        eps=loaded["plan"]["eps"],
    )
    assert rebuilt.digest() == loaded["plan_hash"]
    assert loaded["ks"] == 0.1
