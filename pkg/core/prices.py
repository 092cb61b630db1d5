"""Price and return file ingestion.

Price files are long-format CSV with header `date,ticker,adj_close`, or a
directory of per-ticker CSVs (`date,adj_close`, ticker taken from the file
stem; long-format files are accepted there too). Return files use
`date,ticker,return` and carry no prices.

Every row problem is reported with the 1-based line number of the file.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Union

import numpy as np
import pandas as pd

from .errors import DuplicateRow, InputError, NonPositivePrice, ParseError
from .measures import Period
from .risk import ReturnSeries

logger = logging.getLogger(__name__)

PRICE_COLUMNS = ("date", "ticker", "adj_close")
RETURN_COLUMNS = ("date", "ticker", "return")
DATE_FORMAT = "%Y-%m-%d"

PathLike = Union[str, Path]


@dataclass
class PricePanel:
    """Adjusted close prices per ticker, each a date-sorted pd.Series."""
    prices: Dict[str, pd.Series] = field(default_factory=dict)
    source: str = ""
    row_count: int = 0

    @property
    def tickers(self) -> List[str]:
        return sorted(self.prices)

    def __contains__(self, ticker: str) -> bool:
        return ticker in self.prices

    def __getitem__(self, ticker: str) -> pd.Series:
        return self.prices[ticker]

    def __len__(self) -> int:
        return len(self.prices)

    def first_date(self, ticker: str) -> pd.Timestamp:
        return self.prices[ticker].index[0]

    def last_date(self, ticker: str) -> pd.Timestamp:
        return self.prices[ticker].index[-1]

    def equals(self, other: "PricePanel") -> bool:
        """Same tickers, dates and prices (metadata ignored)."""
        if self.tickers != other.tickers:
            return False
        return all(self.prices[t].equals(other.prices[t]) for t in self.tickers)


# ===== Row validation =====

def _read_rows(path: Path, required: Iterable[str]) -> pd.DataFrame:
    """Read a CSV as strings, with a `line` column holding file line numbers."""
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skip_blank_lines=False)
    except pd.errors.EmptyDataError:
        raise ParseError("file is empty", line=1, source=str(path))
    except pd.errors.ParserError as exc:
        raise ParseError(f"malformed CSV: {exc}", source=str(path)) from exc

    frame.columns = [str(c).strip().lower() for c in frame.columns]
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise ParseError(f"missing column(s) {', '.join(missing)}", line=1, source=str(path))

    frame = frame.fillna("")
    frame["line"] = range(2, len(frame) + 2)
    blank = frame[list(required)].apply(lambda col: col.str.strip() == "").all(axis=1)
    return frame[~blank]


def _parse_dates(frame: pd.DataFrame, source: str) -> pd.Series:
    dates = pd.to_datetime(frame["date"].str.strip(), format="ISO8601", errors="coerce")
    bad = dates.isna()
    if bad.any():
        row = frame[bad].iloc[0]
        raise ParseError(f"invalid date '{row['date']}'", line=int(row["line"]), source=source)
    return dates


def _parse_numbers(frame: pd.DataFrame, column: str, source: str) -> pd.Series:
    values = pd.to_numeric(frame[column].str.strip(), errors="coerce").astype(float)
    bad = ~np.isfinite(values)
    if bad.any():
        row = frame[bad].iloc[0]
        raise ParseError(f"invalid {column} '{row[column]}'", line=int(row["line"]), source=source)
    return values


def _parse_tickers(frame: pd.DataFrame, source: str) -> pd.Series:
    tickers = frame["ticker"].str.strip()
    empty = tickers == ""
    if empty.any():
        raise ParseError("empty ticker", line=int(frame[empty].iloc[0]["line"]), source=source)
    return tickers


def _check_duplicates(rows: pd.DataFrame, source: str) -> None:
    dup = rows.duplicated(subset=["ticker", "date"], keep="first")
    if dup.any():
        row = rows[dup].iloc[0]
        raise DuplicateRow(
            f"duplicate row for {row['ticker']} on {row['date']:{DATE_FORMAT}}",
            line=int(row["line"]), source=source,
        )


def _price_rows(path: Path, default_ticker: Optional[str] = None) -> pd.DataFrame:
    source = str(path)
    required = ("date", "adj_close") if default_ticker else PRICE_COLUMNS
    frame = _read_rows(path, required)
    if default_ticker and "ticker" not in frame.columns:
        frame["ticker"] = default_ticker

    rows = pd.DataFrame({
        "date": _parse_dates(frame, source),
        "ticker": _parse_tickers(frame, source),
        "adj_close": _parse_numbers(frame, "adj_close", source),
        "line": frame["line"],
    })
    non_positive = rows["adj_close"] <= 0
    if non_positive.any():
        row = rows[non_positive].iloc[0]
        raise NonPositivePrice(f"price {row['adj_close']} is not positive",
                               line=int(row["line"]), source=source)
    _check_duplicates(rows, source)
    return rows


def _panel_from_rows(rows: pd.DataFrame, source: str) -> PricePanel:
    prices: Dict[str, pd.Series] = {}
    for ticker, group in rows.groupby("ticker", sort=True):
        series = pd.Series(group["adj_close"].to_numpy(),
                           index=pd.DatetimeIndex(group["date"], name="date"), name=ticker)
        prices[ticker] = series.sort_index()
    return PricePanel(prices=prices, source=source, row_count=len(rows))


# ===== Prices =====

def load_prices(path: PathLike, format: Optional[str] = None) -> PricePanel:
    """Load a price panel.

    Args:
        path: Long-format CSV file, or a directory of per-ticker CSVs
        format: 'long' or 'per_ticker'; inferred from the path when None

    Returns:
        PricePanel with every ticker's prices sorted by date
    """
    path = Path(path)
    if format is None:
        format = "per_ticker" if path.is_dir() else "long"
    if not path.exists():
        raise InputError(f"{path}: no such file or directory")

    if format == "long":
        if path.is_dir():
            raise InputError(f"{path}: expected a CSV file for the long format")
        rows = _price_rows(path)
    elif format == "per_ticker":
        if not path.is_dir():
            raise InputError(f"{path}: expected a directory of per-ticker CSVs")
        files = sorted(path.glob("*.csv"))
        if not files:
            raise InputError(f"{path}: no CSV files found")
        rows = pd.concat([_price_rows(f, default_ticker=f.stem) for f in files], ignore_index=True)
        _check_duplicates(rows, str(path))
    else:
        raise InputError(f"unknown price format '{format}'")

    panel = _panel_from_rows(rows, str(path))
    logger.info(f"Loaded {panel.row_count} price rows for {len(panel)} tickers from {path}")
    return panel


def write_prices(panel: PricePanel, path: PathLike) -> Path:
    """Write a panel as long-format CSV, sorted by ticker then date."""
    path = Path(path)
    frames = [
        pd.DataFrame({"date": series.index, "ticker": ticker, "adj_close": series.to_numpy()})
        for ticker, series in sorted(panel.prices.items())
    ]
    frame = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=PRICE_COLUMNS)
    frame.to_csv(path, index=False, date_format=DATE_FORMAT, lineterminator="\n")
    return path


# ===== Returns =====

def load_returns(path: PathLike, period: Period = Period.MONTHLY) -> Dict[str, ReturnSeries]:
    """Load a `date,ticker,return` file into one ReturnSeries per ticker."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"{path}: no such file")
    source = str(path)
    frame = _read_rows(path, RETURN_COLUMNS)
    rows = pd.DataFrame({
        "date": _parse_dates(frame, source),
        "ticker": _parse_tickers(frame, source),
        "return": _parse_numbers(frame, "return", source),
        "line": frame["line"],
    })
    below = rows["return"] <= -1.0
    if below.any():
        row = rows[below].iloc[0]
        raise ParseError(f"return {row['return']} must exceed -1", line=int(row["line"]), source=source)
    _check_duplicates(rows, source)

    series: Dict[str, ReturnSeries] = {}
    for ticker, group in rows.groupby("ticker", sort=True):
        values = pd.Series(group["return"].to_numpy(),
                           index=pd.DatetimeIndex(group["date"], name="date"), name=ticker).sort_index()
        series[ticker] = ReturnSeries(ticker=ticker, returns=values, period=period)
    logger.info(f"Loaded {len(rows)} return rows for {len(series)} tickers from {path}")
    return series


def write_returns(series: Union[Mapping[str, ReturnSeries], Iterable[ReturnSeries]], path: PathLike) -> Path:
    """Write return series as a `date,ticker,return` CSV, sorted by ticker then date."""
    path = Path(path)
    items = series.values() if isinstance(series, Mapping) else series
    frames = [
        pd.DataFrame({"date": s.returns.index, "ticker": s.ticker, "return": s.values})
        for s in sorted(items, key=lambda s: s.ticker)
    ]
    frame = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=RETURN_COLUMNS)
    frame.to_csv(path, index=False, date_format=DATE_FORMAT, lineterminator="\n")
    return path


def is_returns_file(path: PathLike) -> bool:
    """Whether a CSV carries returns (a `return` column) rather than prices."""
    path = Path(path)
    if path.is_dir():
        return False
    if not path.is_file():
        raise InputError(f"{path}: no such file or directory")
    try:
        header = pd.read_csv(path, nrows=0)
    except pd.errors.EmptyDataError:
        raise ParseError("file is empty", line=1, source=str(path))
    return "return" in [str(c).strip().lower() for c in header.columns]
