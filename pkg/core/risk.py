"""Relative risk measures of a security P against a reference index R.

Four measures are provided:
- TRE: Tsallis relative entropy between two q-Gaussians sharing q (closed form)
- KLRE: Kullback-Leibler relative entropy between Gaussians from moments
- BETA: CAPM beta from aligned return series
- REL_STD: sigma_P / sigma_R

Returns are fractional throughout (0.01 = 1%).
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.integrate import quad

from .errors import (
    DegenerateData, DomainError, InsufficientData, InsufficientOverlap, InternalConsistencyError,
    QMismatch,
)
from .measures import Period, RiskMeasure
from .qgaussian import EPS_Q, MomentSummary, QGaussianFit, fit_fixed_q, ln_q, moments, pdf

logger = logging.getLogger(__name__)

NEGATIVE_ROUNDING = 1e-12
Q_MATCH_TOL = 1e-12

Window = Tuple[pd.Timestamp, pd.Timestamp]


@dataclass(frozen=True)
class ReturnSeries:
    """Dated periodic returns of one security or index."""
    ticker: str
    returns: pd.Series
    period: Period = Period.MONTHLY

    def __post_init__(self):
        index = self.returns.index
        if len(index) > 1 and not index.is_monotonic_increasing or index.has_duplicates:
            raise DomainError(f"{self.ticker}: return dates must be strictly increasing")
        if (self.returns <= -1.0).any():
            raise DomainError(f"{self.ticker}: returns must exceed -1")

    @property
    def values(self) -> np.ndarray:
        return self.returns.to_numpy(dtype=float)

    def __len__(self) -> int:
        return len(self.returns)

    def between(self, start: pd.Timestamp, end: pd.Timestamp) -> "ReturnSeries":
        """Returns dated in (start, end].

        A return dated t is realized over the period ending at t, so a window
        ending at a cycle start holds the return dated on that day and a
        window starting there does not.
        """
        mask = (self.returns.index > start) & (self.returns.index <= end)
        return ReturnSeries(self.ticker, self.returns[mask], self.period)


@dataclass(frozen=True)
class RiskValue:
    """One risk score of a security relative to the reference."""
    measure: RiskMeasure
    value: float
    ticker: str = ""
    window: Optional[Window] = None


@dataclass(frozen=True)
class BetaEstimate:
    """CAPM regression R_j = beta R_m + alpha, with the correlation behind it."""
    beta: float
    alpha: float
    rho: float


PricesLike = Union[pd.Series, Sequence[Tuple[object, float]]]


def _as_price_series(prices: PricesLike) -> pd.Series:
    if isinstance(prices, pd.Series):
        series = prices.astype(float)
        series.index = pd.DatetimeIndex(series.index)
    else:
        pairs = list(prices)
        series = pd.Series([float(p) for _, p in pairs],
                           index=pd.DatetimeIndex([pd.Timestamp(d) for d, _ in pairs]))
    return series


def compute_returns(prices: PricesLike, period: Period = Period.MONTHLY, ticker: str = "") -> ReturnSeries:
    """Simple returns R(t) = (X(t) - X(t-tau)) / X(t-tau), tau = one period.

    Monthly returns use the last available trading price of each calendar
    month, dated on that trading day.
    """
    series = _as_price_series(prices).dropna()
    if (series <= 0).any():
        raise DomainError(f"{ticker}: prices must be positive")
    if not series.index.is_monotonic_increasing or series.index.has_duplicates:
        raise DomainError(f"{ticker}: price dates must be strictly increasing")

    if period == Period.MONTHLY:
        series = series.groupby(series.index.to_period("M")).tail(1)

    if len(series) < 2:
        raise InsufficientData(f"{ticker}: need at least 2 usable prices, got {len(series)}")

    returns = (series.diff() / series.shift(1)).iloc[1:]
    returns.name = ticker or None
    return ReturnSeries(ticker=ticker, returns=returns, period=period)


def _non_negative(value: float, label: str) -> float:
    if value >= 0.0:
        return value
    if value > -NEGATIVE_ROUNDING:
        return 0.0
    raise InternalConsistencyError(f"{label} evaluated to {value:.3e} < 0")


# ===== Entropic measures =====

def tre(fit_p: QGaussianFit, fit_r: QGaussianFit, ticker: str = "",
        window: Optional[Window] = None) -> RiskValue:
    """Tsallis relative entropy S_T(P||R) of two q-Gaussians sharing q.

    S_T = -ln_q(g) + g^(1-q)/2 * [(g^2 - 1) + (3 - q) B_R (M_P - M_R)^2],  g = sqrt(B_R/B_P)
    """
    if abs(fit_p.q - fit_r.q) > Q_MATCH_TOL * max(1.0, fit_r.q):
        raise QMismatch(f"fits carry different q: {fit_p.q} vs {fit_r.q}")
    q = fit_r.q
    gamma = math.sqrt(fit_r.B / fit_p.B)
    distance = (3.0 - q) * fit_r.B * (fit_p.M - fit_r.M) ** 2
    value = -ln_q(gamma, q) + 0.5 * gamma ** (1.0 - q) * ((gamma * gamma - 1.0) + distance)
    return RiskValue(RiskMeasure.TRE, _non_negative(value, "TRE"), ticker, window)


def tre_integral(fit_p: QGaussianFit, fit_r: QGaussianFit) -> float:
    """TRE from its integral form, (int P (P/R)^(q-1) dx - 1)/(q - 1), by adaptive quadrature.

    Independent of the closed form in tre(); used to cross-check it.
    """
    if abs(fit_p.q - fit_r.q) > Q_MATCH_TOL * max(1.0, fit_r.q):
        raise QMismatch(f"fits carry different q: {fit_p.q} vs {fit_r.q}")
    q = fit_r.q
    gaussian = q - 1.0 < EPS_Q

    def integrand(x: float) -> float:
        p = pdf(x, fit_p)
        r = pdf(x, fit_r)
        if p == 0.0:
            return 0.0
        if gaussian:
            return p * math.log(p / r)
        return p * (p / r) ** (q - 1.0)

    scale = 1.0 / math.sqrt(min(fit_p.B, fit_r.B))
    lo = min(fit_p.M, fit_r.M) - 10.0 * scale
    hi = max(fit_p.M, fit_r.M) + 10.0 * scale
    options = dict(epsabs=0.0, epsrel=1e-12, limit=500)
    total = (quad(integrand, -np.inf, lo, **options)[0]
             + quad(integrand, lo, hi, points=[fit_p.M, fit_r.M], **options)[0]
             + quad(integrand, hi, np.inf, **options)[0])
    if gaussian:
        return total
    return (total - 1.0) / (q - 1.0)


def klre(mom_p: MomentSummary, mom_r: MomentSummary, ticker: str = "",
         window: Optional[Window] = None) -> RiskValue:
    """Kullback-Leibler relative entropy of two Gaussians from their moments."""
    if mom_p.sigma <= 0 or mom_r.sigma <= 0:
        raise DegenerateData("KLRE needs positive standard deviations")
    ratio = mom_p.sigma / mom_r.sigma
    value = (-math.log(ratio) + 0.5 * (ratio * ratio - 1.0)
             + (mom_p.mu - mom_r.mu) ** 2 / (2.0 * mom_r.sigma ** 2))
    return RiskValue(RiskMeasure.KLRE, _non_negative(value, "KLRE"), ticker, window)


# ===== Moment and regression measures =====

def rel_std(mom_p: MomentSummary, mom_r: MomentSummary, ticker: str = "",
            window: Optional[Window] = None) -> RiskValue:
    """Relative standard deviation sigma_P / sigma_R."""
    if mom_r.sigma <= 0:
        raise DegenerateData("reference standard deviation is zero")
    return RiskValue(RiskMeasure.REL_STD, mom_p.sigma / mom_r.sigma, ticker, window)


def beta(series_j: ReturnSeries, series_m: ReturnSeries) -> BetaEstimate:
    """CAPM beta and alpha on the dates both series share (inner join, no filling)."""
    joined = pd.concat([series_j.returns.rename("j"), series_m.returns.rename("m")],
                       axis=1, join="inner").dropna()
    if len(joined) < 2:
        raise InsufficientOverlap(
            f"{series_j.ticker} vs {series_m.ticker}: {len(joined)} common dates"
        )
    r_j = joined["j"].to_numpy(dtype=float)
    r_m = joined["m"].to_numpy(dtype=float)
    sigma_m = float(np.std(r_m, ddof=1))
    if sigma_m == 0.0:
        raise DegenerateData(f"{series_m.ticker}: market returns are constant")
    sigma_j = float(np.std(r_j, ddof=1))
    cov = float(np.cov(r_j, r_m, ddof=1)[0, 1])
    rho = cov / (sigma_j * sigma_m) if sigma_j > 0 else 0.0
    rho = min(1.0, max(-1.0, rho))
    b = rho * sigma_j / sigma_m
    return BetaEstimate(beta=b, alpha=float(np.mean(r_j)) - b * float(np.mean(r_m)), rho=rho)


# ===== Per-window evaluation =====

def window_risks(series_p: ReturnSeries, series_r: ReturnSeries, measures: Iterable[RiskMeasure],
                 fit_r: Optional[QGaussianFit] = None,
                 beta_p: Optional[ReturnSeries] = None, beta_r: Optional[ReturnSeries] = None,
                 window: Optional[Window] = None) -> Dict[RiskMeasure, RiskValue]:
    """Every requested measure of P against R over one estimation window.

    Args:
        series_p: Security returns used for fits and moments
        series_r: Reference returns over the same window
        measures: Measures to compute
        fit_r: Reference q-Gaussian fit; required for TRE (P is fitted at its q)
        beta_p: Security returns for beta if they use another period (defaults to series_p)
        beta_r: Reference returns for beta (defaults to series_r)
        window: (start, end) recorded on every RiskValue

    Returns:
        Dict of measure -> RiskValue
    """
    measures = list(measures)
    ticker = series_p.ticker
    risks: Dict[RiskMeasure, RiskValue] = {}

    if RiskMeasure.TRE in measures:
        if fit_r is None:
            raise ValueError("TRE needs the reference fit")
        fit_p = fit_fixed_q(series_p.values, fit_r.q)
        risks[RiskMeasure.TRE] = tre(fit_p, fit_r, ticker, window)

    if RiskMeasure.KLRE in measures or RiskMeasure.REL_STD in measures:
        mom_p = moments(series_p.values)
        mom_r = moments(series_r.values)
        if RiskMeasure.KLRE in measures:
            risks[RiskMeasure.KLRE] = klre(mom_p, mom_r, ticker, window)
        if RiskMeasure.REL_STD in measures:
            risks[RiskMeasure.REL_STD] = rel_std(mom_p, mom_r, ticker, window)

    if RiskMeasure.BETA in measures:
        estimate = beta(beta_p if beta_p is not None else series_p,
                        beta_r if beta_r is not None else series_r)
        risks[RiskMeasure.BETA] = RiskValue(RiskMeasure.BETA, estimate.beta, ticker, window)

    return risks
