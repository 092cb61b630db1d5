"""Tests for return computation and the four relative risk measures."""

import math
import os
import sys

import numpy as np
import pandas as pd
import pytest
from scipy import stats

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from core.errors import DegenerateData, DomainError, InsufficientData, InsufficientOverlap, QMismatch
from core.measures import ALL_MEASURES, Period, RiskMeasure
from core.qgaussian import MomentSummary, QGaussianFit, fit_fixed_q, fit_full, sample
from core.risk import (
    ReturnSeries, beta, compute_returns, klre, rel_std, tre, tre_integral, window_risks,
)
from core.stats import discrete_relative_entropy


def series(values, ticker="X", start="2001-01-31"):
    dates = pd.date_range(start=start, periods=len(values), freq="7D")
    return ReturnSeries(ticker, pd.Series(np.asarray(values, dtype=float), index=dates))


# ===== Returns =====

def test_simple_return():
    result = compute_returns([("2001-01-31", 100.0), ("2001-02-28", 110.0)], ticker="A")
    assert list(result.values) == [0.1]
    assert result.returns.index[0] == pd.Timestamp("2001-02-28")


def test_monthly_returns_use_last_price_of_month():
    prices = pd.Series(
        [100.0, 110.0, 99.0, 121.0, 60.5],
        index=pd.to_datetime(["2001-01-03", "2001-01-31", "2001-02-15", "2001-02-27", "2001-03-30"]),
    )
    monthly = compute_returns(prices, Period.MONTHLY, "A")
    assert list(monthly.returns.index) == [pd.Timestamp("2001-02-27"), pd.Timestamp("2001-03-30")]
    np.testing.assert_allclose(monthly.values, [0.1, -0.5])

    daily = compute_returns(prices, Period.DAILY, "A")
    assert len(daily) == 4


def test_return_errors():
    with pytest.raises(InsufficientData):
        compute_returns([("2001-01-31", 100.0)])
    with pytest.raises(DomainError):
        compute_returns([("2001-01-31", 100.0), ("2001-02-28", 0.0)])
    with pytest.raises(DomainError):
        compute_returns([("2001-02-28", 100.0), ("2001-01-31", 90.0)])


# ===== TRE =====

@pytest.mark.parametrize("q", [1.2, 1.5, 2.0])
def test_tre_closed_form_matches_quadrature(q):
    b_r = 50.0
    for ratio in [0.25, 0.5, 2.0, 4.0]:
        for shift in [0.0, 0.5, 1.0, 2.0]:
            fit_r = QGaussianFit(q=q, M=0.0, B=b_r)
            fit_p = QGaussianFit(q=q, M=shift / math.sqrt(b_r), B=b_r / ratio)
            closed = tre(fit_p, fit_r).value
            assert closed == pytest.approx(tre_integral(fit_p, fit_r), rel=1e-6), (ratio, shift)


def test_tre_reduces_to_klre_near_q_one():
    q = 1.0 + 1e-6
    sigma_r = 0.04
    for ratio in [0.5, 0.8, 1.0, 1.5, 2.0]:
        for shift in [0.0, 0.3, 1.0, 2.0, 3.0]:
            sigma_p = ratio * sigma_r
            mu_p = shift * sigma_r
            fit_p = QGaussianFit(q=q, M=mu_p, B=1.0 / (2 * sigma_p ** 2))
            fit_r = QGaussianFit(q=q, M=0.0, B=1.0 / (2 * sigma_r ** 2))
            kl = klre(MomentSummary(mu_p, sigma_p, 100), MomentSummary(0.0, sigma_r, 100)).value
            assert abs(tre(fit_p, fit_r).value - kl) < 1e-4


def test_tre_zero_for_identical_fits_and_mismatch_rejected():
    fit = QGaussianFit(q=1.4, M=0.01, B=300.0)
    assert tre(fit, fit).value == 0.0
    with pytest.raises(QMismatch):
        tre(QGaussianFit(q=1.5, M=0.0, B=1.0), fit)


def test_entropies_non_negative_on_random_pairs():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        q = rng.uniform(1.01, 2.9)
        fit_r = QGaussianFit(q=q, M=rng.normal(0, 0.05), B=10 ** rng.uniform(0, 4))
        fit_p = QGaussianFit(q=q, M=rng.normal(0, 0.05), B=fit_r.B * 10 ** rng.uniform(-2, 2))
        assert tre(fit_p, fit_r).value >= -1e-12
        mom_p = MomentSummary(rng.normal(0, 0.05), 10 ** rng.uniform(-3, 0), 60)
        mom_r = MomentSummary(rng.normal(0, 0.05), 10 ** rng.uniform(-3, 0), 60)
        assert klre(mom_p, mom_r).value >= -1e-12


def test_tre_is_asymmetric():
    fit_r = QGaussianFit(q=1.5, M=0.0, B=50.0)
    fit_p = QGaussianFit(q=1.5, M=0.0, B=30.0)
    assert tre(fit_p, fit_r).value != pytest.approx(tre(fit_r, fit_p).value, rel=1e-6)


def test_tre_vanishes_only_for_identical_fits():
    grid = [QGaussianFit(q=1.4, M=m, B=b) for m in [-0.01, 0.0, 0.01] for b in [10.0, 50.0, 200.0]]
    for fit_p in grid:
        for fit_r in grid:
            same = fit_p.B == fit_r.B and fit_p.M == fit_r.M
            assert (tre(fit_p, fit_r).value < 1e-12) == same, (fit_p, fit_r)


def test_tre_depends_on_location_difference_only():
    rng = np.random.default_rng(5)
    for _ in range(50):
        q = rng.uniform(1.05, 2.5)
        m_p, m_r = rng.normal(0.0, 0.02, 2)
        b_p, b_r = 10 ** rng.uniform(1, 3, 2)
        base = tre(QGaussianFit(q=q, M=m_p, B=b_p), QGaussianFit(q=q, M=m_r, B=b_r)).value
        for c in [-0.3, 0.05, 1.0]:
            moved = tre(QGaussianFit(q=q, M=m_p + c, B=b_p), QGaussianFit(q=q, M=m_r + c, B=b_r)).value
            assert moved == pytest.approx(base, rel=1e-9, abs=1e-12)


# ===== KLRE & relative standard deviation =====

def test_klre_closed_form():
    mom_r = MomentSummary(0.0, 0.05, 60)
    mom_p = MomentSummary(0.05, 0.10, 60)
    # -ln 2 + (4 - 1)/2 + 0.05^2/(2*0.05^2)
    assert klre(mom_p, mom_r).value == pytest.approx(-math.log(2) + 1.5 + 0.5, rel=1e-14)
    assert klre(mom_r, mom_r).value == 0.0
    with pytest.raises(DegenerateData):
        klre(MomentSummary(0.0, 0.0, 60), mom_r)


def test_rel_std():
    mom_r = MomentSummary(0.0, 0.05, 60)
    assert rel_std(MomentSummary(0.01, 0.10, 60), mom_r).value == pytest.approx(2.0)
    assert rel_std(MomentSummary(0.01, 0.0, 60), mom_r).value == 0.0
    with pytest.raises(DegenerateData):
        rel_std(mom_r, MomentSummary(0.0, 0.0, 60))


def test_klre_matches_discretized_gaussians():
    rng = np.random.default_rng(12)
    edges = np.linspace(-0.5, 0.5, 20_001)
    mids = 0.5 * (edges[:-1] + edges[1:])
    for _ in range(5):
        mu_p, mu_r = rng.uniform(-0.02, 0.02, 2)
        sigma_p, sigma_r = rng.uniform(0.03, 0.06, 2)
        p = stats.norm.pdf(mids, mu_p, sigma_p)
        r = stats.norm.pdf(mids, mu_r, sigma_r)
        p, r = p / p.sum(), r / r.sum()
        expected = klre(MomentSummary(mu_p, sigma_p, 60), MomentSummary(mu_r, sigma_r, 60)).value
        assert discrete_relative_entropy(p, r, 1.0) == pytest.approx(expected, abs=1e-4)


# ===== Beta =====

def test_beta_scale_and_correlation():
    market = np.random.default_rng(1).normal(0.01, 0.04, 120)
    est = beta(series(2.0 * market + 0.003, "J"), series(market, "M"))
    assert est.beta == pytest.approx(2.0, rel=1e-12)
    assert est.alpha == pytest.approx(0.003, abs=1e-12)
    assert est.rho == pytest.approx(1.0, abs=1e-12)


def test_beta_matches_least_squares_slope():
    rng = np.random.default_rng(7)
    market = rng.normal(0.01, 0.04, 120)
    stock = 1.3 * market + rng.normal(0, 0.02, 120)
    est = beta(series(stock), series(market))
    slope, intercept = np.polyfit(market, stock, 1)
    assert est.beta == pytest.approx(slope, rel=1e-9)
    assert est.alpha == pytest.approx(intercept, abs=1e-12)
    sigma_j = np.std(stock, ddof=1)
    sigma_m = np.std(market, ddof=1)
    assert est.beta == pytest.approx(est.rho * sigma_j / sigma_m, rel=1e-12)


def test_beta_aligns_on_common_dates():
    market = series([0.01, -0.02, 0.03, 0.00, 0.02], "M", start="2001-01-31")
    # shifted by two weeks: three common dates
    stock = series([0.02, 0.06, 0.00, 0.04, 0.10], "J", start="2001-02-14")
    est = beta(stock, market)
    np.testing.assert_allclose(
        est.beta, np.polyfit([0.03, 0.00, 0.02], [0.02, 0.06, 0.00], 1)[0], rtol=1e-9
    )


def test_beta_errors():
    with pytest.raises(InsufficientOverlap):
        beta(series([0.01, 0.02], start="2001-01-31"), series([0.01, 0.02], start="2002-01-31"))
    with pytest.raises(DegenerateData):
        beta(series([0.01, 0.02, 0.03]), series([0.01, 0.01, 0.01]))
    est = beta(series([0.01, 0.01, 0.01]), series([0.01, 0.02, 0.04]))
    assert est.beta == 0.0
    assert est.rho == 0.0


def test_beta_scales_with_security_returns():
    rng = np.random.default_rng(3)
    market = rng.normal(0.01, 0.04, 240)
    stock = 0.8 * market + rng.normal(0.0, 0.03, 240)
    base = beta(series(stock), series(market)).beta
    for c in [0.5, 2.0, 7.5]:
        assert beta(series(c * stock), series(market)).beta == pytest.approx(c * base, rel=1e-12)


def test_beta_of_independent_series_is_small():
    for seed in range(10):
        rng = np.random.default_rng(seed)
        est = beta(series(rng.normal(0.0, 0.05, 10_000)), series(rng.normal(0.0, 0.05, 10_000)))
        assert abs(est.beta) < 0.05


# ===== Window evaluation =====

def test_self_comparison_scores():
    data = sample(QGaussianFit(q=1.4, M=0.01, B=400.0), 120, seed=3)
    ref = series(data, "SPX")
    fit_r = fit_full(ref.values)
    fit_r = fit_fixed_q(ref.values, fit_r.q)

    risks = window_risks(series(data, "SPX"), ref, ALL_MEASURES, fit_r=fit_r)
    assert risks[RiskMeasure.TRE].value == 0.0
    assert risks[RiskMeasure.KLRE].value == 0.0
    assert risks[RiskMeasure.BETA].value == pytest.approx(1.0, rel=1e-12)
    assert risks[RiskMeasure.REL_STD].value == 1.0


def test_window_risks_subset_and_missing_fit():
    data = sample(QGaussianFit(q=1.4, M=0.01, B=400.0), 60, seed=4)
    ref = series(data, "SPX")
    stock = series(1.5 * data, "J")
    risks = window_risks(stock, ref, [RiskMeasure.REL_STD, RiskMeasure.BETA])
    assert set(risks) == {RiskMeasure.REL_STD, RiskMeasure.BETA}
    assert risks[RiskMeasure.REL_STD].value == pytest.approx(1.5)
    assert risks[RiskMeasure.BETA].ticker == "J"
    with pytest.raises(ValueError):
        window_risks(stock, ref, [RiskMeasure.TRE])
    # only TRE needs a reference fit
    assert [m for m in ALL_MEASURES if m.needs_fit] == [RiskMeasure.TRE]


def test_return_series_slicing():
    s = series([0.01, 0.02, 0.03, 0.04], start="2001-01-01")
    # open at the start, closed at the end
    window = s.between(pd.Timestamp("2001-01-08"), pd.Timestamp("2001-01-22"))
    assert list(window.values) == [0.03, 0.04]
    assert len(s.between(pd.Timestamp("2000-12-31"), pd.Timestamp("2001-01-01"))) == 1
    with pytest.raises(DomainError):
        series([0.01, -1.0])
    with pytest.raises(DomainError):
        ReturnSeries("X", pd.Series([0.01, 0.02], index=pd.to_datetime(["2001-02-28", "2001-01-31"])))


def test_empty_beta_series_is_not_replaced():
    data = sample(QGaussianFit(q=1.4, M=0.01, B=400.0), 60, seed=4)
    ref = series(data, "SPX")
    stock = series(1.5 * data, "J")
    with pytest.raises(InsufficientOverlap):
        window_risks(stock, ref, [RiskMeasure.BETA], beta_p=series([], "J"), beta_r=ref)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
