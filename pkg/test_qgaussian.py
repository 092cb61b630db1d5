"""Tests for q-Gaussian special functions, density, sampling and MLE fits.

Run from the repository root: pytest test_qgaussian.py
"""

import math
import os
import sys

import numpy as np
import pytest
from scipy import special, stats
from scipy.integrate import quad

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from core.errors import DegenerateData, DomainError, InsufficientData
from core.qgaussian import (
    Q_LOWER, QGaussianFit, cdf, digamma, fit_fixed_q, fit_full, ln_q, mle_residuals, moments,
    normalization_constant, pdf, sample,
)


def student_t(fit: QGaussianFit):
    """The Student-t distribution equal to a q-Gaussian."""
    nu = (3.0 - fit.q) / (fit.q - 1.0)
    return stats.t(nu, loc=fit.M, scale=1.0 / math.sqrt((3.0 - fit.q) * fit.B))


# ===== Special functions =====

def test_ln_q_values():
    assert ln_q(1.0, 1.5) == 0.0
    assert ln_q(2.0, 2.0) == pytest.approx(0.5, rel=1e-15)
    assert ln_q(3.0, 1.0 + 1e-9) == pytest.approx(math.log(3.0), rel=1e-8)
    values = ln_q(np.array([0.5, 1.0, 4.0]), 1.5)
    expected = (np.array([0.5, 1.0, 4.0]) ** -0.5 - 1.0) / -0.5
    np.testing.assert_allclose(values, expected, rtol=1e-14)


def test_digamma_matches_scipy():
    for x in [0.3, 0.5, 1.0, 1.7, 2.5, 6.0, 19.5, 20.0, 150.0]:
        assert digamma(x) == pytest.approx(float(special.digamma(x)), rel=1e-11, abs=1e-13)


def test_normalization_constant_gaussian_limit():
    # C_q -> sqrt(pi) as q -> 1
    assert normalization_constant(1.0 + 1e-9) == pytest.approx(math.sqrt(math.pi), rel=1e-6)
    assert normalization_constant(2.0) == pytest.approx(math.pi, rel=1e-12)


def test_ln_q_continuous_at_one():
    x = np.linspace(0.1, 10.0, 50)
    for q in [1.0 - 1e-7, 1.0 + 1e-7]:
        assert np.max(np.abs(ln_q(x, q) - np.log(x))) < 1e-5


def test_normalization_constant_matches_quadrature():
    q = 1.5
    integral, _ = quad(lambda x: (1.0 + (q - 1.0) * x * x) ** (1.0 / (1.0 - q)), -np.inf, np.inf,
                       epsabs=1e-12, limit=200)
    assert normalization_constant(q) == pytest.approx(integral, rel=1e-10)


# ===== Density and CDF =====

@pytest.mark.parametrize("q", [1.2, 1.5, 2.0, 2.5])
def test_pdf_integrates_to_one(q):
    fit = QGaussianFit(q=q, M=0.01, B=40.0)
    total, _ = quad(lambda x: pdf(x, fit), -np.inf, np.inf, epsabs=1e-12, limit=200)
    assert total == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("q", [1.1, 1.5, 2.2])
def test_pdf_and_cdf_match_student_t(q):
    fit = QGaussianFit(q=q, M=-0.02, B=25.0)
    reference = student_t(fit)
    x = np.linspace(-1.0, 1.0, 41)
    np.testing.assert_allclose(pdf(x, fit), reference.pdf(x), rtol=1e-10)
    np.testing.assert_allclose(cdf(x, fit), reference.cdf(x), atol=1e-7)


def test_cdf_edges_and_scalar():
    fit = QGaussianFit(q=1.4, M=0.5, B=2.0)
    assert cdf(0.5, fit) == 0.5
    assert cdf(np.inf, fit) == 1.0
    assert cdf(-np.inf, fit) == 0.0
    assert isinstance(cdf(0.7, fit), float)
    assert cdf(0.7, fit) + cdf(0.3, fit) == pytest.approx(1.0, abs=1e-12)


def test_pdf_symmetric_and_peaked_at_m():
    fit = QGaussianFit(q=1.6, M=0.1, B=10.0)
    assert pdf(0.3, fit) == pytest.approx(pdf(-0.1, fit), rel=1e-14)
    assert pdf(0.1, fit) > pdf(0.1001, fit)


def test_fit_rejects_invalid_parameters():
    with pytest.raises(DomainError):
        QGaussianFit(q=1.0, M=0.0, B=1.0)
    with pytest.raises(DomainError):
        QGaussianFit(q=3.0, M=0.0, B=1.0)
    with pytest.raises(DomainError):
        QGaussianFit(q=1.5, M=0.0, B=0.0)
    with pytest.raises(DomainError):
        QGaussianFit(q=1.5, M=float("nan"), B=1.0)


def test_cdf_monotone_on_random_grids():
    rng = np.random.default_rng(13)
    for q in [1.1, 1.5, 2.4]:
        fit = QGaussianFit(q=q, M=rng.normal(0.0, 0.01), B=10 ** rng.uniform(1, 3))
        x = np.sort(fit.M + rng.normal(0.0, 3.0, 300) / math.sqrt(fit.B))
        values = cdf(x, fit)
        assert np.all(np.diff(values) >= 0.0)
        assert np.all((values >= 0.0) & (values <= 1.0))


# ===== Sampling & moments =====

def test_sample_reproducible_and_distributed():
    fit = QGaussianFit(q=1.5, M=0.0, B=50.0)
    first = sample(fit, 4000, seed=11)
    np.testing.assert_array_equal(first, sample(fit, 4000, seed=11))
    assert not np.array_equal(first, sample(fit, 4000, seed=12))
    assert stats.kstest(first, student_t(fit).cdf).pvalue > 0.001


def test_moments():
    summary = moments([1.0, 2.0, 3.0, 4.0])
    assert summary.mu == 2.5
    assert summary.sigma == pytest.approx(np.std([1, 2, 3, 4], ddof=1))
    assert summary.n_samples == 4
    with pytest.raises(DegenerateData):
        moments([2.0, 2.0, 2.0])
    with pytest.raises(DegenerateData):
        moments([1.0])


def test_sample_histogram_matches_density():
    fit = QGaussianFit(q=1.5, M=0.01, B=50.0)
    data = sample(fit, 1_000_000, seed=17)
    inner = np.asarray(student_t(fit).ppf(np.linspace(0.02, 0.98, 25)))
    # bin probabilities from the density's own CDF, outer bins open-ended
    probs = np.diff(np.concatenate(([0.0], cdf(inner, fit), [1.0])))
    observed = np.bincount(np.searchsorted(inner, data, side="right"), minlength=probs.size)
    expected = probs * data.size
    statistic = float(np.sum((observed - expected) ** 2 / expected))
    assert statistic < stats.chi2.ppf(0.99, probs.size - 1)


def test_sample_gaussian_limit_variance():
    draws = sample(QGaussianFit(q=1.001, M=0.0, B=0.5), 1_000_000, seed=3)
    assert float(np.std(draws, ddof=1)) == pytest.approx(1.0, rel=0.01)


# ===== Maximum likelihood =====

def test_fit_full_recovers_parameters():
    truth = QGaussianFit(q=1.5, M=0.0, B=50.0)
    recovered = 0
    for seed in range(20):
        fit = fit_full(sample(truth, 5000, seed))
        if (abs(fit.q - truth.q) <= 0.05 and abs(fit.B / truth.B - 1.0) <= 0.10
                and abs(fit.M - truth.M) <= 0.01):
            recovered += 1
    print(f"✓ recovered parameters in {recovered}/20 seeds")
    assert recovered >= 18


def test_mle_residuals_vanish_at_fit():
    for seed, q in [(1, 1.3), (2, 1.5), (3, 1.8)]:
        data = sample(QGaussianFit(q=q, M=0.01, B=80.0), 3000, seed)
        fit = fit_full(data)
        assert fit.converged
        assert fit.n_samples == 3000
        assert all(abs(r) < 1e-8 for r in mle_residuals(data, fit))


def test_fixed_q_fit_solves_location_and_scale():
    data = sample(QGaussianFit(q=1.4, M=-0.005, B=200.0), 2000, seed=5)
    fit = fit_fixed_q(data, 1.4)
    assert fit.q == 1.4
    _, res_b, res_c = mle_residuals(data, fit)
    assert abs(res_b) < 1e-8
    assert abs(res_c) < 1e-8
    assert fit.B == pytest.approx(200.0, rel=0.15)


def test_light_tailed_data_hits_lower_q_bound():
    data = np.random.default_rng(3).uniform(-1.0, 1.0, 2000)
    fit = fit_full(data)
    assert not fit.converged
    assert fit.q == pytest.approx(Q_LOWER, rel=1e-12)


def test_fit_input_errors():
    with pytest.raises(InsufficientData):
        fit_full(np.linspace(-1, 1, 29))
    with pytest.raises(DegenerateData):
        fit_fixed_q(np.full(50, 0.01), 1.5)
    bad = np.linspace(-1, 1, 60)
    bad[3] = np.nan
    with pytest.raises(DomainError):
        fit_full(bad)
    with pytest.raises(DomainError):
        fit_fixed_q(np.linspace(-1, 1, 60), 3.5)


def test_fixed_q_fit_is_shift_and_scale_equivariant():
    data = sample(QGaussianFit(q=1.5, M=0.002, B=80.0), 1500, seed=8)
    base = fit_fixed_q(data, 1.5)

    shifted = fit_fixed_q(data + 0.05, 1.5)
    assert shifted.M == pytest.approx(base.M + 0.05, abs=1e-9)
    assert shifted.B == pytest.approx(base.B, rel=1e-9)

    for s in [0.5, 3.0]:
        scaled = fit_fixed_q(s * data, 1.5)
        assert scaled.B == pytest.approx(base.B / s ** 2, rel=1e-8)
        assert scaled.M == pytest.approx(s * base.M, abs=1e-9)


def test_gaussian_data_fits_near_q_one():
    data = np.random.default_rng(0).standard_normal(5000)
    fit = fit_full(data)
    assert fit.q < 1.1


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
