"""Risk API facade.

High-level, dict-returning workflows combining the core modules: fitting a
series, scoring a security against a reference, KS checks, synthetic data,
and full backtest runs. The CLI is a thin layer over these functions.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import pandas as pd

from core.backtest import diversification_sweep, run_backtest
from core.config import parse_config
from core.errors import InputError
from core.measures import KsMode, Period, RiskMeasure
from core.prices import is_returns_file, load_prices, load_returns, write_returns
from core.qgaussian import QGaussianFit, fit_fixed_q, fit_full
from core.report import emit_report, emit_sweep
from core.risk import ReturnSeries, beta, compute_returns, window_risks
from core.stats import ks_test
from core.synthetic import simulate_returns

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


# ===== Series loading =====

def load_series(data: PathLike, ticker: str, period: Period = Period.MONTHLY,
                start: Optional[str] = None, end: Optional[str] = None) -> ReturnSeries:
    """Returns of one ticker from a returns file or a price panel, limited to [start, end].

    Args:
        data: Returns CSV, long price CSV, or directory of per-ticker price CSVs
        ticker: Ticker to extract
        period: Return period when computing from prices
        start: Inclusive first date (ISO), optional
        end: Inclusive last date (ISO), optional
    """
    if is_returns_file(data):
        series_map = load_returns(data, period=period)
        if ticker not in series_map:
            raise InputError(f"ticker '{ticker}' not found in {data}")
        series = series_map[ticker]
        lo = pd.Timestamp(start) if start else series.returns.index[0]
        hi = pd.Timestamp(end) if end else series.returns.index[-1]
        mask = (series.returns.index >= lo) & (series.returns.index <= hi)
        return ReturnSeries(ticker, series.returns[mask], series.period)

    panel = load_prices(data)
    if ticker not in panel:
        raise InputError(f"ticker '{ticker}' not found in {data}")
    prices = panel[ticker]
    if start:
        prices = prices[prices.index >= pd.Timestamp(start)]
    if end:
        prices = prices[prices.index <= pd.Timestamp(end)]
    return compute_returns(prices, period, ticker)


# ===== Fitting & KS =====

def fit_series(data: PathLike, ticker: str, start: Optional[str] = None, end: Optional[str] = None,
               fix_q: Optional[float] = None, period: Period = Period.MONTHLY,
               alpha: float = 0.05) -> Dict[str, Any]:
    """Fit a q-Gaussian to a ticker's returns and KS-test the fit.

    Returns:
        Dict with ticker, fitted parameters and a 'ks' sub-dict
    """
    series = load_series(data, ticker, period, start, end)
    fit = fit_full(series.values) if fix_q is None else fit_fixed_q(series.values, fix_q)
    result = ks_test(series.values, fit, alpha=alpha)
    logger.info(f"{ticker}: q={fit.q:.4f}, M={fit.M:.6g}, B={fit.B:.6g} from {len(series)} returns")

    payload = {'ticker': ticker, 'period': str(period)}
    payload.update(fit.to_dict())
    payload['ks'] = result.to_dict()
    return payload


def ks_series(data: PathLike, ticker: str, alpha: float = 0.05, bootstrap: Optional[int] = None,
              seed: Optional[int] = None, period: Period = Period.MONTHLY) -> Dict[str, Any]:
    """KS verdict for the full q-Gaussian fit of a ticker's returns."""
    series = load_series(data, ticker, period)
    fit = fit_full(series.values)
    if bootstrap:
        if seed is None:
            raise InputError("--bootstrap needs --seed")
        result = ks_test(series.values, fit, alpha=alpha, mode=KsMode.BOOTSTRAP,
                         n_resamples=bootstrap, seed=seed)
    else:
        result = ks_test(series.values, fit, alpha=alpha)
    payload = result.to_dict()
    payload.update({'ticker': ticker, 'q': fit.q, 'M': fit.M, 'B': fit.B})
    return payload


# ===== Risk =====

def risk_between(data: PathLike, ticker: str, reference: str, measure: Union[str, RiskMeasure],
                 start: Optional[str] = None, end: Optional[str] = None,
                 period: Period = Period.MONTHLY) -> Dict[str, Any]:
    """One risk measure of `ticker` against `reference` over their common dates.

    For TRE, q comes from the full fit of the reference; both series are then
    fitted at that q.
    """
    if isinstance(measure, str):
        try:
            measure = RiskMeasure.from_string(measure)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    series_p = load_series(data, ticker, period, start, end)
    series_r = load_series(data, reference, period, start, end)

    payload: Dict[str, Any] = {'ticker': ticker, 'reference': reference, 'measure': str(measure)}
    fit_r: Optional[QGaussianFit] = None
    if measure == RiskMeasure.TRE:
        q = fit_full(series_r.values).q
        fit_r = fit_fixed_q(series_r.values, q)
        payload['q'] = q
    if measure == RiskMeasure.BETA:
        estimate = beta(series_p, series_r)
        payload.update({'value': estimate.beta, 'alpha': estimate.alpha, 'rho': estimate.rho})
        return payload

    value = window_risks(series_p, series_r, [measure], fit_r=fit_r)[measure]
    payload['value'] = value.value
    return payload


# ===== Synthetic data =====

def simulate(q: float, B: float, M: float, n: int, seed: int, out: PathLike,
             ticker: str = "SIM", period: Period = Period.DAILY) -> Dict[str, Any]:
    """Write n synthetic q-Gaussian returns as a `date,ticker,return` CSV."""
    fit = QGaussianFit(q=q, M=M, B=B)
    series = simulate_returns(fit, n, seed, ticker=ticker, period=period)
    path = write_returns([series], out)
    logger.info(f"Wrote {n} simulated returns for {ticker} to {path}")
    return {'ticker': ticker, 'q': q, 'M': M, 'B': B, 'n': n, 'seed': seed, 'path': str(path)}


# ===== Backtests =====

def backtest(config_path: Optional[PathLike], prices_path: PathLike, out_dir: PathLike,
             plots: bool = False, workers: int = 1) -> Dict[str, Any]:
    """Run a configured backtest and write its report.

    Returns:
        Summary dict with cycle count, per-measure fits and written files
    """
    config = parse_config(config_path)
    panel = load_prices(prices_path)
    report = run_backtest(panel, config, workers=workers)
    written = emit_report(report, out_dir, plots=plots)
    return {
        'procedure': str(config.procedure),
        'n_cycles': len(report.cycles),
        'fits': {str(m): p.fit.to_dict() for m, p in report.profiles.items()},
        'files': [p.name for p in written],
    }


def diversify(config_path: Optional[PathLike], prices_path: PathLike, out_dir: PathLike,
              per_bin_values: Sequence[int], workers: int = 1) -> Dict[str, Any]:
    """Profile fits across several portfolio sizes."""
    config = parse_config(config_path)
    panel = load_prices(prices_path)
    sweep = diversification_sweep(panel, config, per_bin_values, workers=workers)
    written = emit_sweep(sweep, out_dir)
    return {
        'sizes': {str(size): {str(m): fit.to_dict() for m, fit in fits.items()}
                  for size, fits in sorted(sweep.items())},
        'files': [p.name for p in written],
    }


def parse_sizes(text: str) -> List[int]:
    """Parse a comma-separated list of portfolio sizes."""
    try:
        sizes = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise InputError(f"invalid portfolio sizes '{text}'")
    if not sizes or any(s < 1 for s in sizes):
        raise InputError(f"portfolio sizes must be positive integers, got '{text}'")
    return sizes
