"""Synthetic data: q-Gaussian return series and planted-beta universes.

Used by the `simulate` command and by tests that need data with a known
answer.
"""

import logging
import math
from typing import Dict, Tuple

import numpy as np
import pandas as pd

from .errors import DomainError
from .measures import Period
from .prices import PricePanel
from .qgaussian import QGaussianFit, sample
from .risk import ReturnSeries

logger = logging.getLogger(__name__)

RETURN_FLOOR = -0.95


def month_ends(start, periods: int) -> pd.DatetimeIndex:
    """`periods` consecutive calendar month-end dates from start's month."""
    months = pd.period_range(start=pd.Timestamp(start).to_period("M"), periods=periods, freq="M")
    return pd.DatetimeIndex(months.to_timestamp(how="end").normalize(), name="date")


def simulate_returns(fit: QGaussianFit, n: int, seed: int, ticker: str = "SIM",
                     start: str = "2000-01-03", period: Period = Period.DAILY) -> ReturnSeries:
    """n q-Gaussian returns dated on consecutive business days (or month ends)."""
    values = sample(fit, n, seed)
    if np.any(values <= -1.0):
        raise DomainError("q-Gaussian draws fell at or below -1; reduce the scale or raise B")
    if period == Period.MONTHLY:
        dates = month_ends(start, n)
    else:
        dates = pd.bdate_range(start=start, periods=n, name="date")
    return ReturnSeries(ticker=ticker, returns=pd.Series(values, index=dates, name=ticker), period=period)


def _unit_t(rng: np.random.Generator, dof: float, size: int) -> np.ndarray:
    """Student-t draws scaled to unit variance."""
    return rng.standard_t(dof, size=size) * math.sqrt((dof - 2.0) / dof)


def _prices_from_returns(returns: np.ndarray, dates: pd.DatetimeIndex, ticker: str) -> pd.Series:
    levels = 100.0 * np.concatenate(([1.0], np.cumprod(1.0 + returns)))
    return pd.Series(levels, index=dates, name=ticker)


def planted_universe(n_securities: int = 100, n_months: int = 144, seed: int = 0,
                     beta_range: Tuple[float, float] = (0.5, 2.0), late_fraction: float = 0.2,
                     reference_ticker: str = "SPX", start: str = "1995-01-31",
                     market_drift: float = 0.015, market_scale: float = 0.03,
                     noise_scale: float = 0.01, tail_dof: float = 4.0) -> Tuple[PricePanel, Dict[str, float]]:
    """Monthly price panel where security j earns beta_j * R_m + eps_j.

    R_m and eps_j are heavy-tailed (Student-t with tail_dof degrees of
    freedom). Betas are spread evenly over beta_range and assigned in random
    order. A late_fraction of the securities lists between one and five years
    after the first date, so a Procedure II universe grows over time.

    Returns:
        (panel, planted beta per ticker)
    """
    if tail_dof <= 2.0:
        raise DomainError(f"tail_dof must exceed 2 for finite variance, got {tail_dof}")
    rng = np.random.default_rng(seed)
    dates = month_ends(start, n_months + 1)

    market = market_drift + market_scale * _unit_t(rng, tail_dof, n_months)
    market = np.maximum(market, RETURN_FLOOR)
    prices = {reference_ticker: _prices_from_returns(market, dates, reference_ticker)}

    betas = rng.permutation(np.linspace(beta_range[0], beta_range[1], n_securities))
    n_late = int(round(late_fraction * n_securities))
    late = set(rng.choice(n_securities, size=n_late, replace=False).tolist()) if n_late else set()

    planted = {}
    for j, b in enumerate(betas):
        ticker = f"S{j:03d}"
        returns = np.maximum(b * market + noise_scale * _unit_t(rng, tail_dof, n_months), RETURN_FLOOR)
        series = _prices_from_returns(returns, dates, ticker)
        if j in late:
            listing = int(rng.integers(12, max(13, min(61, n_months // 2 + 1))))
            series = series.iloc[listing:]
        prices[ticker] = series
        planted[ticker] = float(b)

    rows = sum(len(s) for s in prices.values())
    logger.debug(f"Planted universe: {n_securities} securities, {n_late} late listings, {n_months} months")
    return PricePanel(prices=dict(sorted(prices.items())), source="synthetic", row_count=rows), planted
