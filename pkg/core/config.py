"""Backtest configuration files and runtime settings.

Config files use dotenv syntax, one `KEY=value` per line, `#` comments.
Keys are case-insensitive and every key is optional:

    PROCEDURE=II
    WINDOW_YEARS=5
    SHIFT_MONTHS=6
    HORIZON_MONTHS=6
    SECURITIES_PER_BIN=25
    N_BINS=13
    MEASURES=tre,klre,beta,relstd
    Q_REFRESH_MONTHS=12
    REFERENCE_TICKER=SPX
    START_DATE=2000-01-04
    END_DATE=2018-05-30
    KS_ALPHA=0.05
    KS_MODE=asymptotic
    BETA_PERIOD=monthly
    FIT_PERIOD=monthly
    SEED=0

Runtime settings come from the environment (or a local .env):
QRISK_LOG_LEVEL, QRISK_WORKERS, QRISK_PLOTS.
"""

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Union

import pandas as pd
from dotenv import dotenv_values, load_dotenv

from .backtest import BacktestConfig
from .errors import ConfigValidationError, InputError
from .measures import KsMode, Period, Procedure, RiskMeasure

load_dotenv()

logger = logging.getLogger(__name__)

TRUE_VALUES = ("1", "true", "yes", "on")
FALSE_VALUES = ("0", "false", "no", "off", "")


def _optional(parse: Callable[[str], Any]) -> Callable[[str], Any]:
    def parse_optional(value: str) -> Any:
        if value.strip().lower() in ("", "none"):
            return None
        return parse(value)
    return parse_optional


def _int(value: str) -> int:
    return int(value.strip())


def _date(value: str) -> pd.Timestamp:
    return pd.Timestamp(value.strip())


def _measures(value: str) -> tuple:
    names = [v for v in value.replace(";", ",").split(",") if v.strip()]
    if not names:
        raise ValueError("no measures listed")
    if len(names) == 1 and names[0].strip().lower() == "all":
        return tuple(RiskMeasure)
    return tuple(RiskMeasure.from_string(name) for name in names)


FIELD_PARSERS: Dict[str, Callable[[str], Any]] = {
    'procedure': Procedure.from_string,
    'window_years': _int,
    'shift_months': _int,
    'horizon_months': _int,
    'securities_per_bin': _int,
    'n_bins': _optional(_int),
    'measures': _measures,
    'q_refresh_months': _int,
    'reference_ticker': str.strip,
    'start_date': _optional(_date),
    'end_date': _optional(_date),
    'ks_alpha': lambda v: float(v.strip()),
    'ks_mode': KsMode.from_string,
    'beta_period': Period.from_string,
    'fit_period': Period.from_string,
    'seed': _int,
}


def config_from_mapping(values: Dict[str, Optional[str]], source: str = "config") -> BacktestConfig:
    """Build a BacktestConfig from raw string values, collecting every violation."""
    errors: List[str] = []
    fields: Dict[str, Any] = {}

    for raw_key, raw_value in values.items():
        key = raw_key.strip().lower()
        if key not in FIELD_PARSERS:
            errors.append(f"{source}: unknown key '{raw_key}'")
            continue
        if key in fields:
            errors.append(f"{source}: key '{raw_key}' given more than once")
            continue
        if raw_value is None:
            errors.append(f"{source}: key '{raw_key}' has no value")
            continue
        try:
            fields[key] = FIELD_PARSERS[key](raw_value)
        except (ValueError, TypeError) as exc:
            errors.append(f"{source}: invalid {key} '{raw_value}': {exc}")

    config = None
    try:
        config = BacktestConfig(**fields)
    except ConfigValidationError as exc:
        errors.extend(exc.errors)

    if errors:
        raise ConfigValidationError(errors)
    return config


def parse_config(path: Union[str, Path, None]) -> BacktestConfig:
    """Parse and validate a backtest config file; None yields the defaults.

    Raises:
        ConfigValidationError: listing every problem found
    """
    if path is None:
        return BacktestConfig()
    path = Path(path)
    if not path.is_file():
        raise InputError(f"{path}: config file not found")
    config = config_from_mapping(dict(dotenv_values(path)), source=str(path))
    logger.info(f"Loaded config from {path}: procedure {config.procedure}, measures "
                f"{','.join(str(m) for m in config.measures)}")
    return config


# ===== Runtime settings =====

@dataclass(frozen=True)
class Settings:
    log_level: str = "INFO"
    workers: int = 1
    plots: bool = False


def _env_flag(name: str, default: bool) -> bool:
    raw = os.getenv(name)
    if raw is None:
        return default
    value = raw.strip().lower()
    if value in TRUE_VALUES:
        return True
    if value in FALSE_VALUES:
        return False
    raise InputError(f"{name} must be a boolean flag, got '{raw}'")


def get_settings() -> Settings:
    """Runtime settings from QRISK_* environment variables."""
    level = os.getenv("QRISK_LOG_LEVEL", "INFO").strip().upper()
    if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        raise InputError(f"QRISK_LOG_LEVEL must be a logging level name, got '{level}'")
    try:
        workers = int(os.getenv("QRISK_WORKERS", "1"))
    except ValueError:
        raise InputError(f"QRISK_WORKERS must be an integer, got '{os.getenv('QRISK_WORKERS')}'")
    if workers < 1:
        raise InputError(f"QRISK_WORKERS must be >= 1, got {workers}")
    return Settings(log_level=level, workers=workers, plots=_env_flag("QRISK_PLOTS", False))
