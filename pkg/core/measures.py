"""Enumerations shared across the library.

Risk measures, backtest procedures, return periods and KS modes, each with a
forgiving string parser for CLI and config input.
"""

from enum import Enum


class RiskMeasure(str, Enum):
    """The four relative risk measures."""
    TRE = "tre"          # Tsallis relative entropy
    KLRE = "klre"        # Kullback-Leibler relative entropy
    BETA = "beta"        # CAPM beta
    REL_STD = "relstd"   # sigma_P / sigma_R

    @classmethod
    def from_string(cls, value: str) -> "RiskMeasure":
        """Parse a measure name, accepting common aliases."""
        if not value:
            raise ValueError("empty risk measure")

        normalized = value.strip().lower().replace("-", "_")
        mapping = {
            'tre': cls.TRE,
            'tsallis': cls.TRE,
            'klre': cls.KLRE,
            'kl': cls.KLRE,
            'beta': cls.BETA,
            'relstd': cls.REL_STD,
            'rel_std': cls.REL_STD,
            'sigma': cls.REL_STD,
        }
        if normalized not in mapping:
            raise ValueError(f"unknown risk measure '{value}'")
        return mapping[normalized]

    @property
    def needs_fit(self) -> bool:
        """Whether the measure needs q-Gaussian fits (the others use moments)."""
        return self == RiskMeasure.TRE

    def __str__(self):
        return self.value


ALL_MEASURES = (RiskMeasure.TRE, RiskMeasure.KLRE, RiskMeasure.BETA, RiskMeasure.REL_STD)


class Procedure(str, Enum):
    """Backtest procedures.

    - I: fixed universe, equal-count bins re-derived every cycle
    - II: growing universe, bin edges frozen at the first cycle
    """
    I = "I"
    II = "II"

    @classmethod
    def from_string(cls, value: str) -> "Procedure":
        normalized = str(value).strip().upper()
        mapping = {'I': cls.I, '1': cls.I, 'II': cls.II, '2': cls.II}
        if normalized not in mapping:
            raise ValueError(f"unknown procedure '{value}'")
        return mapping[normalized]

    def __str__(self):
        return self.value


class Period(str, Enum):
    """Sampling period of a return series."""
    DAILY = "daily"
    MONTHLY = "monthly"

    @classmethod
    def from_string(cls, value: str) -> "Period":
        normalized = str(value).strip().lower()
        mapping = {
            'daily': cls.DAILY,
            'd': cls.DAILY,
            'monthly': cls.MONTHLY,
            'm': cls.MONTHLY,
        }
        if normalized not in mapping:
            raise ValueError(f"unknown period '{value}'")
        return mapping[normalized]

    def __str__(self):
        return self.value


class KsMode(str, Enum):
    """How the KS critical distance is obtained."""
    ASYMPTOTIC = "asymptotic"
    BOOTSTRAP = "bootstrap"

    @classmethod
    def from_string(cls, value: str) -> "KsMode":
        normalized = str(value).strip().lower()
        if normalized not in ('asymptotic', 'bootstrap'):
            raise ValueError(f"unknown KS mode '{value}'")
        return cls(normalized)

    def __str__(self):
        return self.value
