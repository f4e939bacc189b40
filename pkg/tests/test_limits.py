import math

import numpy as np
import pytest

from bernoulli_sieve import (
    KindMismatch,
    LawKind,
    LimitLaw,
    Normalization,
    Regime,
    RegimeMismatch,
    beta_theta_one,
    centering_b,
    example_gamma,
    g_kernel,
    gil_pelaez_cdf,
    limit_cdf,
    limit_law_for,
    ml_moment,
    moments,
    normalization_for,
    pareto_log_tail,
    parse_law,
    quantile_r,
    scaling_a,
    solve_c,
    truncated_mean_m,
    tsm2,
)
from scipy import special

# CDF values of the two stable laws at reference points, from 30-digit
# quadrature of the Gil-Pelaez integral with the exact characteristic
# functions (independent of the package's own inversion)
STABLE_C_15 = {
    -8.0: 0.04217678872039406,
    -2.0: 0.17553767006943510,
    0.0: 1.0 / 3.0,
    1.0: 0.45509797139518320,
    5.0: 0.94978506537524940,
}
STABLE_D = {
    -6.0: 0.19291031446641765,
    -1.0: 0.54898190718047410,
    0.0: 0.71316711987458230,
    2.0: 0.98590564206585120,
}


# ---------------------------------------------------------------------------
# centering
# ---------------------------------------------------------------------------

def test_centering_beta_closed_form():
    # b = log n - 1 + 1/n for the uniform stick
    for n in (1000, 10 ** 6, 10 ** 9):
        assert centering_b(beta_theta_one(1.0), n) == pytest.approx(
            math.log(n) - 1.0 + 1.0 / n, rel=1e-10
        )


def test_centering_regime_e_is_zero():
    assert centering_b(pareto_log_tail(0.5), 10 ** 6) == 0.0


def test_centering_needs_n_at_least_two():
    with pytest.raises(ValueError):
        centering_b(beta_theta_one(1.0), 1)


def test_centering_cross_check_runs_on_all_regimes():
    # the closed reduction and the Stieltjes route must agree internally;
    # a pass here means no QuadratureFailure was raised
    for law in ("beta:2", "example:0.3", "tsm2", "paretolog:1.5"):
        for n in (10 ** 3, 10 ** 12):
            assert centering_b(parse_law(law), n) > 0.0


def test_centering_regime_d_positive_and_sublinear():
    spec = pareto_log_tail(1.0)
    b6 = centering_b(spec, 10 ** 6)
    assert 0.0 < b6 < math.log(10 ** 6)


def test_example_gamma_second_order_term_grows_toward_asymptote():
    # mu^{-1} log n - b_n approaches (1/(0.7 mu)) log^{0.7} n from below
    spec = example_gamma(0.3)
    mu = moments(spec).mu
    ratios = []
    for n in (10 ** 3, 10 ** 6, 10 ** 9):
        big_l = math.log(n)
        gap = big_l / mu - centering_b(spec, n)
        ratios.append(gap / (big_l ** 0.7 / (0.7 * mu)))
    assert 0.0 < ratios[0] < ratios[1] < ratios[2] < 1.0


# ---------------------------------------------------------------------------
# scaling and auxiliaries
# ---------------------------------------------------------------------------

def test_scaling_regime_a():
    assert scaling_a(beta_theta_one(1.0), 1000) == pytest.approx(
        math.sqrt(math.log(1000.0))
    )


def test_scaling_regime_e_closed_form():
    for n in (10 ** 4, 10 ** 9):
        assert scaling_a(pareto_log_tail(0.5), n) == pytest.approx(
            math.log(n) ** 0.5
        )


def test_solve_c_power_law():
    spec = pareto_log_tail(1.5)
    assert solve_c(spec, 8) == pytest.approx(4.0, rel=1e-7)
    assert solve_c(spec, 1) == pytest.approx(1.0)


def test_solve_c_tsm2_residual():
    c = solve_c(tsm2(), 20)
    assert abs(20.0 * (1.0 + 2.0 * math.log(c)) / c ** 2 - 1.0) <= 1e-8


def test_solve_c_wrong_regime():
    with pytest.raises(RegimeMismatch):
        solve_c(beta_theta_one(1.0), 10)


def test_truncated_mean_closed_form():
    # P{xi > x} = min(1, 1/x) gives m(x) = 1 + log x past 1
    spec = pareto_log_tail(1.0)
    assert truncated_mean_m(spec, 10.0) == pytest.approx(1.0 + math.log(10.0), rel=1e-9)
    assert truncated_mean_m(spec, 0.5) == pytest.approx(0.5, rel=1e-9)


def test_quantile_r_identity():
    spec = pareto_log_tail(1.0)
    for x in (2.0, 7.0, 40.0):
        assert quantile_r(spec, x) == pytest.approx(x, rel=1e-9)
    assert quantile_r(spec, 0.5) == 0.0


def test_m_concavity():
    spec = pareto_log_tail(1.0)
    m = lambda x: truncated_mean_m(spec, x)
    # concavity: the midpoint value dominates the average of the ends
    assert 2.0 * m(10.0) >= m(5.0) + m(15.0)
    grid = [1.0, 3.0, 9.0, 27.0]
    for lo, hi in zip(grid[:-1], grid[1:]):
        assert m(0.5 * (lo + hi)) >= 0.5 * (m(lo) + m(hi)) - 1e-12


def test_g_kernel_linear_in_regimes_abc():
    for law in ("beta:2", "tsm2", "paretolog:1.5"):
        spec = parse_law(law)
        g = g_kernel(spec)
        mu = moments(spec).mu
        assert g(10.0) == pytest.approx(10.0 / mu)


def test_g_kernel_regime_d_subadditive():
    g = g_kernel(pareto_log_tail(1.0))
    grid = [2.0, 5.0, 10.0, 20.0]
    for x in grid:
        for z in grid:
            assert g(x) + g(z) >= g(x + z) - 1e-9
        for gamma in (0.25, 0.5, 0.75):
            assert g(gamma * x) >= gamma * g(x) - 1e-9


def test_centering_stability_regime_d():
    # (g(x) - g(x-y))/f(x) -> 0 with f the regime-D scaling at e^x
    spec = pareto_log_tail(1.0)
    g = g_kernel(spec)

    def f(x):
        m_x = truncated_mean_m(spec, x)
        return quantile_r(spec, x / m_x) / m_x

    y = 1.5
    vals = [(g(x) - g(x - y)) / f(x) for x in (10.0, 40.0, 160.0)]
    assert vals[0] > vals[1] > vals[2] > 0.0


def test_normalization_bundle():
    norm = normalization_for(parse_law("paretolog:1.5"), 10 ** 6)
    assert norm.regime is Regime.C
    assert norm.c_n is not None and norm.a > 0
    d = norm.to_dict()
    assert set(d) == {"regime", "n", "a", "b", "c_n"}
    norm_d = normalization_for(pareto_log_tail(1.0), 10 ** 6)
    assert norm_d.m is not None and norm_d.r is not None
    np.testing.assert_allclose(
        norm_d.normalize([norm_d.b, norm_d.b + norm_d.a]), [0.0, 1.0], atol=1e-12
    )


def test_normalization_regime_e_rejects_centering():
    with pytest.raises(ValueError):
        Normalization(regime=Regime.E, n=10, a=1.0, b=2.0, g_kernel="0")


# ---------------------------------------------------------------------------
# limit laws
# ---------------------------------------------------------------------------

def test_limit_law_for_regimes():
    assert limit_law_for(beta_theta_one(1.0)).kind is LawKind.NORMAL
    assert limit_law_for(tsm2()).kind is LawKind.NORMAL
    assert limit_law_for(pareto_log_tail(1.5)).kind is LawKind.STABLE_C
    assert limit_law_for(pareto_log_tail(1.0)).kind is LawKind.STABLE_D
    assert limit_law_for(pareto_log_tail(0.5)).kind is LawKind.MITTAG_LEFFLER


def test_normal_cdf_symmetry():
    law = LimitLaw.normal()
    assert law.cdf(0.0) == pytest.approx(0.5)
    assert limit_cdf(law, 1.96) == pytest.approx(0.975, abs=1e-3)


def test_gil_pelaez_reproduces_erf_pipeline():
    law = LimitLaw.normal()
    grid = np.linspace(-5.0, 5.0, 100)
    inverted = np.array([gil_pelaez_cdf(law.char, x) for x in grid])
    assert np.max(np.abs(inverted - special.ndtr(grid))) <= 1e-6


def test_stable_c_envelope_coefficient():
    # Gamma(1-alpha) cos(pi alpha/2) stays positive on (1,2)
    for alpha in (1.1, 1.5, 1.9):
        coeff = special.gamma(1.0 - alpha) * math.cos(math.pi * alpha / 2.0)
        assert coeff > 0.0
    law = LimitLaw.stable_c(1.5)
    assert -math.log(abs(law.char(np.array([1.0]))[0])) == pytest.approx(
        2.506628, abs=1e-6
    )


def test_stable_c_cdf_reference_points():
    law = LimitLaw.stable_c(1.5)
    for x, want in STABLE_C_15.items():
        assert law.cdf(x) == pytest.approx(want, abs=1e-6)


def test_stable_d_cdf_reference_points():
    law = LimitLaw.stable_d()
    for x, want in STABLE_D.items():
        assert law.cdf(x) == pytest.approx(want, abs=1e-6)


@pytest.mark.parametrize("law", [LimitLaw.stable_c(1.5), LimitLaw.stable_d()])
def test_stable_cdf_monotone_unit_range(law):
    vals = law.cdf(np.linspace(-10.0, 10.0, 60))
    assert np.all((vals >= 0.0) & (vals <= 1.0))
    assert np.all(np.diff(vals) >= -1e-9)


def test_char_modulus_bounded():
    t = np.linspace(-30.0, 30.0, 400)
    for law in (LimitLaw.normal(), LimitLaw.stable_c(1.3), LimitLaw.stable_d()):
        assert np.all(np.abs(law.char(t)) <= 1.0 + 1e-12)


def test_ml_moments():
    assert ml_moment(0.0, 3) == pytest.approx(6.0)
    assert ml_moment(0.5, 1) == pytest.approx(2.0 / math.pi)
    assert ml_moment(0.5, 2) == pytest.approx(2.0 / math.pi)
    with pytest.raises(ValueError):
        ml_moment(1.0, 1)


def test_kind_mismatch_paths():
    ml = LimitLaw.mittag_leffler(0.5)
    with pytest.raises(KindMismatch):
        ml.cdf(0.5)
    with pytest.raises(KindMismatch):
        LimitLaw.normal().moment(2)
    with pytest.raises(KindMismatch):
        ml.char(np.array([1.0]))
