"""Goodness-of-fit statistics and discrete entropies.

- ks_test: Kolmogorov-Smirnov distance of data against a q-Gaussian fit
- linear_fit: least-squares line through a risk-return profile with its
  chi2 goodness statistic (the coefficient of determination, not the
  chi-squared distribution statistic)
- shannon_entropy / tsallis_entropy / discrete_relative_entropy: discrete
  oracles for the closed forms in risk.py
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike

from .errors import (
    DegenerateProfile, DomainError, InsufficientData, NotNormalized, SupportViolation,
)
from .measures import KsMode
from .qgaussian import EPS_Q, MIN_SAMPLES, QGaussianFit, cdf, fit_fixed_q, sample

logger = logging.getLogger(__name__)

NORMALIZATION_TOL = 1e-9
DEFAULT_RESAMPLES = 1000

# One-sample asymptotic KS coefficients c(alpha)
KS_COEFFICIENTS = {
    0.10: 1.224,
    0.05: 1.358,
    0.025: 1.480,
    0.01: 1.628,
    0.001: 1.949,
}


@dataclass(frozen=True)
class KsResult:
    d_max: float
    d_crit: float
    n: int
    alpha: float
    passed: bool
    mode: KsMode = KsMode.ASYMPTOTIC

    def to_dict(self) -> dict:
        return {
            'd_max': self.d_max,
            'd_crit': self.d_crit,
            'n': self.n,
            'alpha': self.alpha,
            'pass': self.passed,
            'mode': str(self.mode),
        }


@dataclass(frozen=True)
class LinearFit:
    """e = p0 + p1 * s fitted over a risk-return profile."""
    p0: float
    p1: float
    chi2: float
    n_points: int

    def predict(self, s: ArrayLike) -> np.ndarray:
        return self.p0 + self.p1 * np.asarray(s, dtype=float)

    def to_dict(self) -> dict:
        return {'p0': self.p0, 'p1': self.p1, 'chi2': self.chi2, 'n_points': self.n_points}


# ===== Kolmogorov-Smirnov =====

def ks_coefficient(alpha: float) -> float:
    """c(alpha) for the asymptotic critical distance c(alpha)/sqrt(n)."""
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    for level, c in KS_COEFFICIENTS.items():
        if math.isclose(alpha, level, rel_tol=1e-12):
            return c
    return math.sqrt(-0.5 * math.log(alpha / 2.0))


def ks_distance(data: ArrayLike, fit: QGaussianFit) -> float:
    """Two-sided sup |F_n - F| evaluated at both sides of every step."""
    x = np.sort(np.asarray(data, dtype=float).ravel())
    n = x.size
    model = np.asarray(cdf(x, fit), dtype=float)
    ranks = np.arange(1, n + 1, dtype=float)
    d_plus = float(np.max(ranks / n - model))
    d_minus = float(np.max(model - (ranks - 1.0) / n))
    return min(1.0, max(0.0, d_plus, d_minus))


def ks_test(data: ArrayLike, fit: QGaussianFit, alpha: float = 0.05,
            mode: KsMode = KsMode.ASYMPTOTIC, n_resamples: int = DEFAULT_RESAMPLES,
            seed: Optional[int] = None) -> KsResult:
    """Kolmogorov-Smirnov test of data against a fitted q-Gaussian.

    Asymptotic mode compares D_max with c(alpha)/sqrt(n). Bootstrap mode draws
    n_resamples synthetic samples of size n from the fit, refits M and B at the
    fit's q, and takes the (1 - alpha) quantile of their distances as D_crit.
    That accounts for the parameters having been estimated from the data.
    """
    x = np.asarray(data, dtype=float).ravel()
    n = int(x.size)
    if n < MIN_SAMPLES:
        raise InsufficientData(f"KS test needs at least {MIN_SAMPLES} observations, got {n}")
    mode = KsMode.from_string(mode) if isinstance(mode, str) else mode

    d_max = ks_distance(x, fit)

    if mode == KsMode.ASYMPTOTIC:
        d_crit = ks_coefficient(alpha) / math.sqrt(n)
    else:
        ks_coefficient(alpha)  # validates alpha
        if seed is None:
            raise DomainError("bootstrap KS needs a seed")
        if n_resamples < 1:
            raise DomainError(f"n_resamples must be positive, got {n_resamples}")
        rng = np.random.default_rng(seed)
        seeds = rng.integers(0, 2**32, size=n_resamples)
        distances = np.empty(n_resamples)
        for k, child in enumerate(seeds):
            synthetic = sample(fit, n, int(child))
            distances[k] = ks_distance(synthetic, fit_fixed_q(synthetic, fit.q))
        d_crit = float(np.quantile(distances, 1.0 - alpha))
        logger.debug(f"bootstrap KS: {n_resamples} resamples, d_crit={d_crit:.5f}")

    return KsResult(d_max=d_max, d_crit=d_crit, n=n, alpha=alpha,
                    passed=d_max < d_crit, mode=mode)


# ===== Risk-return regression =====

def linear_fit(s: ArrayLike, e: ArrayLike) -> LinearFit:
    """Least-squares line e = p0 + p1 s with chi2 = 1 - SSR/SST."""
    s = np.asarray(s, dtype=float).ravel()
    e = np.asarray(e, dtype=float).ravel()
    if s.size != e.size:
        raise DomainError(f"profile has {s.size} risks but {e.size} returns")
    if s.size < 3:
        raise DegenerateProfile(f"linear fit needs at least 3 points, got {s.size}")
    if np.ptp(e) == 0.0:
        raise DegenerateProfile("excess returns are constant")
    if np.ptp(s) == 0.0:
        raise DegenerateProfile("risk values are constant")

    s_mean = float(np.mean(s))
    e_mean = float(np.mean(e))
    ds = s - s_mean
    de = e - e_mean
    p1 = float(np.dot(ds, de) / np.dot(ds, ds))
    p0 = e_mean - p1 * s_mean

    residuals = e - (p0 + p1 * s)
    chi2 = 1.0 - float(np.dot(residuals, residuals)) / float(np.dot(de, de))
    return LinearFit(p0=p0, p1=p1, chi2=chi2, n_points=int(s.size))


# ===== Discrete entropies =====

def _probabilities(p: ArrayLike, label: str = "p") -> np.ndarray:
    arr = np.asarray(p, dtype=float).ravel()
    if arr.size == 0:
        raise NotNormalized(f"{label} is empty")
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise DomainError(f"{label} must hold non-negative finite probabilities")
    total = float(arr.sum())
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise NotNormalized(f"{label} sums to {total!r}")
    return arr


def shannon_entropy(p: ArrayLike) -> float:
    """Sum of p_i ln(1/p_i), with 0 ln(1/0) = 0."""
    arr = _probabilities(p)
    nz = arr[arr > 0]
    return float(-np.sum(nz * np.log(nz)))


def tsallis_entropy(p: ArrayLike, q: float) -> float:
    """(1 - sum p_i^q) / (q - 1); the Shannon entropy at q = 1."""
    arr = _probabilities(p)
    if abs(q - 1.0) < EPS_Q:
        return shannon_entropy(arr)
    nz = arr[arr > 0]
    return float((1.0 - np.sum(nz ** q)) / (q - 1.0))


def discrete_relative_entropy(p: ArrayLike, r: ArrayLike, q: float) -> float:
    """Tsallis relative entropy (sum p_i (p_i/r_i)^(q-1) - 1)/(q - 1) of discrete p and r.

    At q = 1 this is the Kullback-Leibler divergence sum p_i ln(p_i/r_i).
    """
    p_arr = _probabilities(p, "p")
    r_arr = _probabilities(r, "r")
    if p_arr.size != r_arr.size:
        raise DomainError(f"p has {p_arr.size} entries but r has {r_arr.size}")
    support = p_arr > 0
    if np.any(r_arr[support] == 0):
        raise SupportViolation("r vanishes where p is positive")

    pp = p_arr[support]
    ratio = pp / r_arr[support]
    if abs(q - 1.0) < EPS_Q:
        return float(np.sum(pp * np.log(ratio)))
    return float((np.sum(pp * ratio ** (q - 1.0)) - 1.0) / (q - 1.0))
