"""Core domain modules for q-Gaussian risk measurement.

This package provides:
- Risk measure, procedure and period enumerations (measures.py)
- The exception hierarchy (errors.py)
- q-Gaussian density, CDF, sampling and maximum-likelihood fits (qgaussian.py)
- TRE, KLRE, beta and relative standard deviation (risk.py)
- KS tests, profile line fits and discrete entropies (stats.py)
- Rolling-window Procedure I / II backtests (backtest.py)
- Price and return file ingestion (prices.py)
- Backtest config files and runtime settings (config.py)
- Report and plot emission (report.py)
- Synthetic returns and planted universes (synthetic.py)
"""

from .errors import QRiskError, InputError
from .measures import RiskMeasure, Procedure, Period, KsMode, ALL_MEASURES
from .qgaussian import QGaussianFit, MomentSummary

__all__ = [
    'QRiskError', 'InputError',
    'RiskMeasure', 'Procedure', 'Period', 'KsMode', 'ALL_MEASURES',
    'QGaussianFit', 'MomentSummary',
]
