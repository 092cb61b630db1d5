"""Rolling-window risk/return backtests (Procedures I and II).

Every cycle estimates risks over a window of `window_years` before the cycle
start, bins securities by risk, and measures each bin's mean monthly forward
return over `horizon_months` in excess of the reference index. Cycles are
shifted by `shift_months`. Averaging the bins over all cycles yields one
risk/return profile per measure.

- Procedure I: a fixed universe (securities listed before the first window
  and still trading at the last cycle) and equal-count bins in every cycle.
- Procedure II: the universe grows as securities accumulate a full window of
  history; bin edges are fixed by the first cycle's equal-count binning.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .errors import (
    ConfigValidationError, DegenerateProfile, DomainError, EmptyUniverse, InputError,
    InsufficientData, InsufficientSpan, QRiskError, TooFewSecurities,
)
from .measures import ALL_MEASURES, KsMode, Period, Procedure, RiskMeasure
from .prices import PricePanel
from .qgaussian import QGaussianFit, fit_fixed_q, fit_full
from .risk import ReturnSeries, RiskValue, compute_returns, window_risks
from .stats import KsResult, LinearFit, ks_test, linear_fit

logger = logging.getLogger(__name__)


# ===== Configuration =====

@dataclass(frozen=True)
class BacktestConfig:
    """Parameters of one backtest run; defaults are the S&P 500 setup (5y windows, 6m shifts)."""
    procedure: Procedure = Procedure.I
    window_years: int = 5
    shift_months: int = 6
    horizon_months: int = 6
    securities_per_bin: int = 25
    n_bins: Optional[int] = None
    measures: Tuple[RiskMeasure, ...] = ALL_MEASURES
    q_refresh_months: int = 12
    reference_ticker: str = "SPX"
    start_date: Optional[pd.Timestamp] = None
    end_date: Optional[pd.Timestamp] = None
    ks_alpha: float = 0.05
    ks_mode: KsMode = KsMode.ASYMPTOTIC
    beta_period: Period = Period.MONTHLY
    fit_period: Period = Period.MONTHLY
    seed: int = 0

    def __post_init__(self):
        errors = self.validate()
        if errors:
            raise ConfigValidationError(errors)

    def validate(self) -> List[str]:
        """Every violated constraint, empty when the config is valid."""
        errors = []
        if self.window_years < 1:
            errors.append(f"window_years must be >= 1, got {self.window_years}")
        if self.shift_months < 1:
            errors.append(f"shift_months must be >= 1, got {self.shift_months}")
        if self.horizon_months < 1:
            errors.append(f"horizon_months must be >= 1, got {self.horizon_months}")
        if self.horizon_months > self.shift_months:
            errors.append(
                f"horizon_months ({self.horizon_months}) must not exceed shift_months ({self.shift_months})"
            )
        if self.securities_per_bin < 1:
            errors.append(f"securities_per_bin must be >= 1, got {self.securities_per_bin}")
        if self.n_bins is not None and self.n_bins < 1:
            errors.append(f"n_bins must be >= 1, got {self.n_bins}")
        if not self.measures:
            errors.append("measures must name at least one risk measure")
        elif len(set(self.measures)) != len(self.measures):
            errors.append("measures contains duplicates")
        if self.q_refresh_months < 1:
            errors.append(f"q_refresh_months must be >= 1, got {self.q_refresh_months}")
        if not self.reference_ticker:
            errors.append("reference_ticker must not be empty")
        if not (0.0 < self.ks_alpha < 1.0):
            errors.append(f"ks_alpha must lie in (0, 1), got {self.ks_alpha}")
        if self.start_date is not None and self.end_date is not None and self.start_date >= self.end_date:
            errors.append("start_date must precede end_date")
        return errors

    def to_dict(self) -> dict:
        """JSON-ready echo of every field."""
        return {
            'procedure': str(self.procedure),
            'window_years': self.window_years,
            'shift_months': self.shift_months,
            'horizon_months': self.horizon_months,
            'securities_per_bin': self.securities_per_bin,
            'n_bins': self.n_bins,
            'measures': [str(m) for m in self.measures],
            'q_refresh_months': self.q_refresh_months,
            'reference_ticker': self.reference_ticker,
            'start_date': self.start_date.strftime("%Y-%m-%d") if self.start_date is not None else None,
            'end_date': self.end_date.strftime("%Y-%m-%d") if self.end_date is not None else None,
            'ks_alpha': self.ks_alpha,
            'ks_mode': str(self.ks_mode),
            'beta_period': str(self.beta_period),
            'fit_period': str(self.fit_period),
            'seed': self.seed,
        }


# ===== Result types =====

@dataclass(frozen=True)
class CycleWindow:
    cycle_index: int
    window_start: pd.Timestamp
    cycle_start: pd.Timestamp
    forward_end: pd.Timestamp


@dataclass(frozen=True)
class SecurityRecord:
    ticker: str
    risks: Dict[RiskMeasure, RiskValue]
    forward_return: float


@dataclass(frozen=True)
class CycleResult:
    """Risks and forward returns of every security kept in one cycle."""
    cycle_index: int
    cycle_start: pd.Timestamp
    records: Tuple[SecurityRecord, ...]
    reference_forward_return: float
    q_used: float
    universe_size: int
    dropped: Tuple[str, ...] = ()

    def risks(self, measure: RiskMeasure) -> Dict[str, float]:
        return {r.ticker: r.risks[measure].value for r in self.records}

    def forward_returns(self) -> Dict[str, float]:
        return {r.ticker: r.forward_return for r in self.records}


@dataclass(frozen=True)
class BinnedPortfolio:
    """An equal-weight portfolio of the securities whose risk falls in one bin.

    mean_excess_return stays None until forward returns are attached, and for
    bins left empty in a cycle.
    """
    bin_index: int
    risk_lo: float
    risk_hi: float
    risk_center: float
    members: Tuple[str, ...]
    mean_excess_return: Optional[float] = None


@dataclass(frozen=True)
class ProfilePoint:
    bin_index: int
    mean_risk: float
    e_rel: float
    n_cycles: int


@dataclass(frozen=True)
class RiskReturnProfile:
    measure: RiskMeasure
    points: Tuple[ProfilePoint, ...]
    fit: LinearFit
    n_cycles: int


@dataclass(frozen=True)
class KsSummary:
    """Fit quality of the reference q-Gaussian on a q-refresh cycle."""
    cycle_index: int
    cycle_start: pd.Timestamp
    fit: QGaussianFit
    result: KsResult


@dataclass
class RunReport:
    config: BacktestConfig
    profiles: Dict[RiskMeasure, RiskReturnProfile]
    cycles: List[CycleResult] = field(default_factory=list)
    ks_summaries: List[KsSummary] = field(default_factory=list)


# ===== Return preparation =====

@dataclass
class ReturnPanel:
    """Per-ticker return series for every period a run needs."""
    series: Dict[str, Dict[Period, ReturnSeries]]
    first_dates: Dict[str, pd.Timestamp]
    last_dates: Dict[str, pd.Timestamp]

    @classmethod
    def from_prices(cls, panel: PricePanel, periods: Sequence[Period]) -> "ReturnPanel":
        series: Dict[str, Dict[Period, ReturnSeries]] = {}
        first_dates, last_dates = {}, {}
        for ticker in panel.tickers:
            prices = panel[ticker]
            try:
                series[ticker] = {p: compute_returns(prices, p, ticker) for p in set(periods)}
            except InsufficientData as exc:
                logger.warning(f"Skipping {ticker}: {exc}")
                continue
            first_dates[ticker] = panel.first_date(ticker)
            last_dates[ticker] = panel.last_date(ticker)
        return cls(series=series, first_dates=first_dates, last_dates=last_dates)

    def __contains__(self, ticker: str) -> bool:
        return ticker in self.series

    def get(self, ticker: str, period: Period) -> ReturnSeries:
        return self.series[ticker][period]


def _required_periods(config: BacktestConfig) -> Tuple[Period, ...]:
    # monthly returns are always needed for forward returns
    return tuple(sorted({Period.MONTHLY, config.fit_period, config.beta_period}, key=str))


# ===== Cycle planning =====

def _covers(first_date: pd.Timestamp, window_start: pd.Timestamp) -> bool:
    """Whether data starting at first_date spans a window starting at window_start (month granularity)."""
    return first_date.to_period("M") <= window_start.to_period("M")


def enumerate_cycles(config: BacktestConfig, calendar: Sequence) -> List[CycleWindow]:
    """All cycle windows that fit inside the calendar.

    Cycle k starts at start + k*shift_months (start defaults to the first date
    plus window_years). Enumeration stops at the first cycle whose forward
    window ends after the last date.
    """
    dates = pd.DatetimeIndex(calendar).sort_values()
    if len(dates) == 0:
        raise InsufficientSpan("empty calendar")
    first = dates[0]
    last = dates[-1] if config.end_date is None else min(dates[-1], config.end_date)
    window = pd.DateOffset(years=config.window_years)
    start = config.start_date if config.start_date is not None else first + window

    if not _covers(first, start - window):
        raise InsufficientSpan(
            f"data from {first:%Y-%m-%d} cannot fill a {config.window_years}-year window before {start:%Y-%m-%d}"
        )

    cycles = []
    k = 0
    while True:
        cycle_start = start + pd.DateOffset(months=k * config.shift_months)
        forward_end = cycle_start + pd.DateOffset(months=config.horizon_months)
        if forward_end > last:
            break
        cycles.append(CycleWindow(k, cycle_start - window, cycle_start, forward_end))
        k += 1

    if not cycles:
        raise InsufficientSpan(
            f"data ending {last:%Y-%m-%d} cannot hold a {config.horizon_months}-month forward window "
            f"after {start:%Y-%m-%d}"
        )
    logger.info(f"Enumerated {len(cycles)} cycles from {cycles[0].cycle_start:%Y-%m-%d}")
    return cycles


def select_universe(returns: ReturnPanel, cycle: CycleWindow, config: BacktestConfig,
                    cycles: Sequence[CycleWindow]) -> List[str]:
    """Tickers eligible for a cycle, sorted; the reference is never included.

    Procedure I ignores `cycle` and returns the fixed list: listed by the first
    window start and still trading at the last cycle start. Procedure II
    returns every ticker with history back to this cycle's window start that
    still trades at its start.
    """
    if config.procedure == Procedure.I:
        window_start = cycles[0].window_start
        trading_at = cycles[-1].cycle_start
    else:
        window_start = cycle.window_start
        trading_at = cycle.cycle_start

    universe = sorted(
        ticker for ticker in returns.series
        if ticker != config.reference_ticker
        and _covers(returns.first_dates[ticker], window_start)
        and returns.last_dates[ticker] >= trading_at
    )
    if not universe:
        raise EmptyUniverse(f"no security qualifies for cycle {cycle.cycle_index} ({cycle.cycle_start:%Y-%m-%d})")
    return universe


def plan_q_refresh(cycles: Sequence[CycleWindow], config: BacktestConfig) -> List[int]:
    """For each cycle, the index of the cycle whose full fit supplies q.

    q is re-estimated once q_refresh_months have elapsed since the last refresh.
    """
    plan = []
    last_refresh = None
    for cycle in cycles:
        if last_refresh is None or (cycle.cycle_index - last_refresh) * config.shift_months >= config.q_refresh_months:
            last_refresh = cycle.cycle_index
        plan.append(last_refresh)
    return plan


def fit_reference(returns: ReturnPanel, cycle: CycleWindow, config: BacktestConfig) -> KsSummary:
    """Full q-Gaussian fit of the reference over a cycle's window, with its KS check."""
    window = returns.get(config.reference_ticker, config.fit_period).between(cycle.window_start, cycle.cycle_start)
    fit = fit_full(window.values)
    result = ks_test(window.values, fit, alpha=config.ks_alpha, mode=config.ks_mode,
                     seed=config.seed + cycle.cycle_index)
    logger.info(
        f"Cycle {cycle.cycle_index}: reference q={fit.q:.4f} "
        f"(D_max={result.d_max:.4f}, D_crit={result.d_crit:.4f}, {'pass' if result.passed else 'fail'})"
    )
    return KsSummary(cycle.cycle_index, cycle.cycle_start, fit, result)


# ===== One cycle =====

def _forward_return(series: ReturnSeries, cycle: CycleWindow, horizon_months: int) -> Optional[float]:
    """Mean monthly return dated in (cycle_start, forward_end], None unless all months are present."""
    forward = series.between(cycle.cycle_start, cycle.forward_end)
    if len(forward) != horizon_months:
        return None
    return float(np.mean(forward.values))


def run_cycle(returns: ReturnPanel, universe: Sequence[str], cycle: CycleWindow,
              config: BacktestConfig, q_state: QGaussianFit) -> CycleResult:
    """Risks and forward returns for one cycle.

    Risks use returns dated in (window_start, cycle_start]; forward returns
    those dated in (cycle_start, forward_end]. The reference's M and B are
    refitted at q_state.q; each security is then fitted at the same q.
    Securities whose fit fails or whose forward window is incomplete are
    dropped with a warning.
    """
    ref = config.reference_ticker
    window = (cycle.window_start, cycle.cycle_start)
    measures = config.measures

    ref_series = returns.get(ref, config.fit_period).between(*window)
    ref_beta = returns.get(ref, config.beta_period).between(*window)
    ref_forward = _forward_return(returns.get(ref, Period.MONTHLY), cycle, config.horizon_months)
    if ref_forward is None:
        raise InsufficientData(f"{ref}: incomplete forward window in cycle {cycle.cycle_index}")

    fit_r = fit_fixed_q(ref_series.values, q_state.q) if any(m.needs_fit for m in measures) else None

    records, dropped = [], []
    for ticker in universe:
        try:
            if ticker not in returns:
                raise InsufficientData("no usable returns")
            forward = _forward_return(returns.get(ticker, Period.MONTHLY), cycle, config.horizon_months)
            if forward is None:
                raise InsufficientData("incomplete forward window")
            risks = window_risks(
                returns.get(ticker, config.fit_period).between(*window), ref_series, measures,
                fit_r=fit_r,
                beta_p=returns.get(ticker, config.beta_period).between(*window), beta_r=ref_beta,
                window=window,
            )
        except QRiskError as exc:
            logger.warning(f"Cycle {cycle.cycle_index}: dropping {ticker}: {exc}")
            dropped.append(ticker)
            continue
        records.append(SecurityRecord(ticker, risks, forward))

    logger.info(f"Cycle {cycle.cycle_index} ({cycle.cycle_start:%Y-%m-%d}): "
                f"{len(records)}/{len(universe)} securities, q={q_state.q:.4f}")
    return CycleResult(
        cycle_index=cycle.cycle_index,
        cycle_start=cycle.cycle_start,
        records=tuple(records),
        reference_forward_return=ref_forward,
        q_used=q_state.q,
        universe_size=len(universe),
        dropped=tuple(dropped),
    )


# ===== Binning =====

def bin_equal_count(risks: Mapping[str, float], securities_per_bin: int,
                    n_bins: Optional[int] = None) -> List[BinnedPortfolio]:
    """Equal-count bins over risk-sorted securities (ties broken by ticker).

    Forms n_bins groups (default: as many full groups as fit); the remainder
    joins the highest-risk bin. Inner edges sit midway between neighbouring
    groups, outer edges at the extreme risks.
    """
    ordered = sorted(risks.items(), key=lambda item: (item[1], item[0]))
    total = len(ordered)
    if securities_per_bin < 1 or total < securities_per_bin:
        raise TooFewSecurities(f"{total} securities cannot fill a bin of {securities_per_bin}")
    if n_bins is None:
        n_bins = total // securities_per_bin
    elif n_bins * securities_per_bin > total:
        raise TooFewSecurities(f"{total} securities cannot fill {n_bins} bins of {securities_per_bin}")

    values = [value for _, value in ordered]
    bounds = [i * securities_per_bin for i in range(n_bins)] + [total]
    edges = [values[0]]
    edges += [0.5 * (values[b - 1] + values[b]) for b in bounds[1:-1]]
    edges.append(values[-1])

    bins = []
    for i in range(n_bins):
        lo, hi = edges[i], edges[i + 1]
        members = tuple(ticker for ticker, _ in ordered[bounds[i]:bounds[i + 1]])
        bins.append(BinnedPortfolio(i, lo, hi, 0.5 * (lo + hi), members))
    return bins


def bin_edges(bins: Sequence[BinnedPortfolio]) -> List[float]:
    return [b.risk_lo for b in bins] + [bins[-1].risk_hi]


def bin_fixed_edges(risks: Mapping[str, float], edges: Sequence[float]) -> List[BinnedPortfolio]:
    """Assign securities to fixed bins [edge_i, edge_i+1); the top edge is closed.

    Risks outside the edges join the nearest extreme bin. Bins may be empty.
    """
    edges = np.asarray(edges, dtype=float)
    if edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise DomainError("bin edges must be strictly increasing")
    n_bins = edges.size - 1

    members: List[List[str]] = [[] for _ in range(n_bins)]
    for ticker, value in sorted(risks.items(), key=lambda item: (item[1], item[0])):
        idx = int(np.searchsorted(edges, value, side="right")) - 1
        members[min(max(idx, 0), n_bins - 1)].append(ticker)

    return [
        BinnedPortfolio(i, float(edges[i]), float(edges[i + 1]), 0.5 * float(edges[i] + edges[i + 1]),
                        tuple(members[i]))
        for i in range(n_bins)
    ]


def attach_excess_returns(bins: Sequence[BinnedPortfolio], forward_returns: Mapping[str, float],
                          reference_forward: float) -> List[BinnedPortfolio]:
    """Equal-weight mean forward return of each bin minus the reference's."""
    attached = []
    for portfolio in bins:
        if not portfolio.members:
            attached.append(replace(portfolio, mean_excess_return=None))
            continue
        mean = math.fsum(forward_returns[t] for t in portfolio.members) / len(portfolio.members)
        attached.append(replace(portfolio, mean_excess_return=mean - reference_forward))
    return attached


def bin_cycles(cycles: Sequence[CycleResult], measure: RiskMeasure,
               config: BacktestConfig) -> List[List[BinnedPortfolio]]:
    """Binned portfolios per cycle for one measure, by the configured procedure."""
    binned = []
    edges = None
    n_bins = config.n_bins
    for result in cycles:
        risks = result.risks(measure)
        if n_bins is None:
            n_bins = len(risks) // config.securities_per_bin
            if n_bins < 1:
                raise TooFewSecurities(
                    f"{len(risks)} securities cannot fill a bin of {config.securities_per_bin}"
                )
        if edges is None or config.procedure == Procedure.I:
            # bin count is fixed by the first cycle; later cycles shrink the groups instead
            if len(risks) < n_bins:
                raise TooFewSecurities(f"{len(risks)} securities cannot fill {n_bins} bins")
            per_bin = config.securities_per_bin
            if config.n_bins is not None or n_bins * per_bin > len(risks):
                per_bin = len(risks) // n_bins
            bins = bin_equal_count(risks, per_bin, n_bins)
            if config.procedure == Procedure.II:
                edges = bin_edges(bins)
                if any(b <= a for a, b in zip(edges, edges[1:])):
                    raise DegenerateProfile(f"first-cycle {measure} bin edges are not strictly increasing")
        else:
            bins = bin_fixed_edges(risks, edges)
        binned.append(attach_excess_returns(bins, result.forward_returns(), result.reference_forward_return))
    return binned


# ===== Aggregation =====

def aggregate_profiles(cycle_bins: Mapping[RiskMeasure, Sequence[Sequence[BinnedPortfolio]]],
                       config: BacktestConfig) -> Dict[RiskMeasure, RiskReturnProfile]:
    """Average each bin's center risk and excess return over the cycles it is occupied in.

    Raises:
        DegenerateProfile: when a profile cannot be fitted with a line
    """
    profiles = {}
    for measure in config.measures:
        per_cycle = cycle_bins[measure]
        if not per_cycle:
            raise DegenerateProfile(f"{measure}: no cycles to aggregate")

        collected: Dict[int, List[Tuple[float, float]]] = {}
        for bins in per_cycle:
            for portfolio in bins:
                if portfolio.mean_excess_return is None:
                    continue
                collected.setdefault(portfolio.bin_index, []).append(
                    (portfolio.risk_center, portfolio.mean_excess_return)
                )

        points = tuple(
            ProfilePoint(
                bin_index=idx,
                mean_risk=math.fsum(r for r, _ in samples) / len(samples),
                e_rel=math.fsum(e for _, e in samples) / len(samples),
                n_cycles=len(samples),
            )
            for idx, samples in sorted(collected.items())
        )
        try:
            fit = linear_fit([p.mean_risk for p in points], [p.e_rel for p in points])
        except DegenerateProfile as exc:
            raise DegenerateProfile(f"{measure}: {exc}") from exc
        profiles[measure] = RiskReturnProfile(measure, points, fit, n_cycles=len(per_cycle))
        logger.info(f"{measure}: slope={fit.p1:.6g}, intercept={fit.p0:.6g}, chi2={fit.chi2:.4f}")
    return profiles


# ===== Runs =====

_WORKER_RETURNS: Optional[ReturnPanel] = None
_WORKER_CONFIG: Optional[BacktestConfig] = None


def _init_worker(returns: ReturnPanel, config: BacktestConfig) -> None:
    global _WORKER_RETURNS, _WORKER_CONFIG
    _WORKER_RETURNS = returns
    _WORKER_CONFIG = config


def _run_cycle_in_worker(task: Tuple[List[str], CycleWindow, QGaussianFit]) -> CycleResult:
    universe, cycle, q_state = task
    return run_cycle(_WORKER_RETURNS, universe, cycle, _WORKER_CONFIG, q_state)


def _run_cycles(panel: PricePanel, config: BacktestConfig,
                workers: int = 1) -> Tuple[List[CycleResult], List[KsSummary]]:
    ref = config.reference_ticker
    if ref not in panel:
        raise InputError(f"reference ticker '{ref}' is not in the price panel")

    returns = ReturnPanel.from_prices(panel, _required_periods(config))
    if ref not in returns:
        raise InsufficientData(f"reference ticker '{ref}' has too few prices")

    cycles = enumerate_cycles(config, panel[ref].index)
    plan = plan_q_refresh(cycles, config)

    refreshes = {idx: fit_reference(returns, cycles[idx], config) for idx in sorted(set(plan))}
    tasks = [
        (select_universe(returns, cycle, config, cycles), cycle, refreshes[plan[cycle.cycle_index]].fit)
        for cycle in cycles
    ]

    if workers > 1:
        logger.info(f"Running {len(tasks)} cycles on {workers} worker processes")
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                                 initargs=(returns, config)) as executor:
            results = list(executor.map(_run_cycle_in_worker, tasks))
    else:
        results = [run_cycle(returns, universe, cycle, config, q_state) for universe, cycle, q_state in tasks]

    results.sort(key=lambda r: r.cycle_index)
    return results, [refreshes[idx] for idx in sorted(refreshes)]


def build_profiles(cycles: Sequence[CycleResult], config: BacktestConfig) -> Dict[RiskMeasure, RiskReturnProfile]:
    cycle_bins = {measure: bin_cycles(cycles, measure, config) for measure in config.measures}
    return aggregate_profiles(cycle_bins, config)


def run_backtest(panel: PricePanel, config: BacktestConfig, workers: int = 1) -> RunReport:
    """Run Procedure I or II end to end.

    Args:
        panel: Prices of the reference and every candidate security
        config: Backtest parameters
        workers: Process pool size for cycles; 1 runs in-process

    Returns:
        RunReport with one profile per enabled measure
    """
    logger.info(f"Starting Procedure {config.procedure} backtest against {config.reference_ticker}")
    cycles, ks_summaries = _run_cycles(panel, config, workers)
    profiles = build_profiles(cycles, config)
    return RunReport(config=config, profiles=profiles, cycles=cycles, ks_summaries=ks_summaries)


def diversification_sweep(panel: PricePanel, config: BacktestConfig, per_bin_values: Sequence[int],
                          workers: int = 1) -> Dict[int, Dict[RiskMeasure, LinearFit]]:
    """Profile fits for several portfolio sizes over the same cycles.

    Cycle fits are computed once and re-binned per size. Sizes whose profile
    cannot be fitted are skipped with a warning.
    """
    cycles, _ = _run_cycles(panel, config, workers)
    sweep: Dict[int, Dict[RiskMeasure, LinearFit]] = {}
    for per_bin in sorted(set(per_bin_values)):
        sized = replace(config, securities_per_bin=per_bin, n_bins=None)
        try:
            profiles = build_profiles(cycles, sized)
        except (DegenerateProfile, TooFewSecurities) as exc:
            logger.warning(f"Skipping {per_bin} securities per bin: {exc}")
            continue
        sweep[per_bin] = {measure: profile.fit for measure, profile in profiles.items()}
    return sweep
