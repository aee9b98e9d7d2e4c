"""Stationarity testing, weekly deseasonalization, and min-max scaling.

Deseasonalize/reseasonalize and the scaler transform/inverse are exact
inverse pairs so forecasts can be restored to currency units.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CoverageError, DataError, LengthError, SingularityError
from .series import DatedSeries

#: Large-sample critical values for the constant-only test regression.
ADF_CRITICAL_VALUES = {"1%": -3.43, "5%": -2.86, "10%": -2.57}


@dataclass(frozen=True)
class ADFResult:
    statistic: float
    critical_values: dict[str, float]
    lags_used: int
    is_stationary: bool

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "critical_values": dict(self.critical_values),
            "lags_used": self.lags_used,
            "is_stationary": self.is_stationary,
        }


def default_adf_lag(n: int) -> int:
    """Schwert's rule: floor(12 * (n/100)^(1/4))."""
    return int(np.floor(12.0 * (n / 100.0) ** 0.25))


def adf_test(series, max_lag: int | None = None) -> ADFResult:
    """Augmented Dickey-Fuller unit-root test, constant-only regression.

    Fits dy_t = c + g*y_{t-1} + sum_i phi_i * dy_{t-i} + e_t by ordinary
    least squares and reports the t-ratio on g against fixed large-sample
    critical values; the verdict is taken at the 5% level.
    """
    y = np.asarray(series, dtype=float)
    n = len(y)
    if n < 20:
        raise LengthError(f"ADF needs at least 20 observations, got {n}")
    if max_lag is None:
        max_lag = default_adf_lag(n)
    if max_lag < 0 or max_lag >= n / 4:
        raise DataError(f"max_lag must satisfy 0 <= max_lag < n/4, got {max_lag}")
    if np.ptp(y) == 0.0:
        raise SingularityError("constant series: zero-variance regressor")

    dy = np.diff(y)
    k = max_lag
    rows = len(dy) - k
    X = np.empty((rows, 2 + k))
    X[:, 0] = 1.0
    X[:, 1] = y[k : n - 1]
    for i in range(1, k + 1):
        X[:, 1 + i] = dy[k - i : len(dy) - i]
    target = dy[k:]

    coef, _, rank, _ = np.linalg.lstsq(X, target, rcond=None)
    if rank < X.shape[1]:
        raise SingularityError("ADF design matrix is rank-deficient")
    resid = target - X @ coef
    dof = rows - X.shape[1]
    if dof <= 0:
        raise LengthError("too few observations for the requested lag order")
    sigma2 = float(resid @ resid) / dof
    xtx_inv = np.linalg.inv(X.T @ X)
    se = np.sqrt(sigma2 * xtx_inv[1, 1])
    if se == 0.0:
        raise SingularityError("degenerate ADF regression: zero standard error")
    stat = float(coef[1] / se)
    return ADFResult(
        statistic=stat,
        critical_values=dict(ADF_CRITICAL_VALUES),
        lags_used=k,
        is_stationary=bool(stat < ADF_CRITICAL_VALUES["5%"]),
    )


@dataclass(frozen=True)
class SeasonalIndex:
    """Multiplicative weekday factors, indexed Monday=0 .. Sunday=6."""

    factors: np.ndarray
    zero_replaced: bool = False

    def __post_init__(self):
        f = np.ascontiguousarray(self.factors, dtype=float)
        if f.shape != (7,):
            raise DataError("seasonal index needs exactly 7 factors")
        if not np.all(np.isfinite(f)) or np.any(f <= 0):
            raise DataError("seasonal factors must be finite and > 0")
        f.setflags(write=False)
        object.__setattr__(self, "factors", f)

    def to_dict(self) -> dict:
        days = ("monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday")
        return {
            "factors": {d: float(v) for d, v in zip(days, self.factors)},
            "zero_replaced": self.zero_replaced,
        }


def fit_seasonal_index(train: DatedSeries) -> SeasonalIndex:
    """Median-based weekly index: weekday median over overall median.

    A factor that would come out zero is replaced by 1 and flagged, so
    division downstream stays defined.
    """
    mask = ~train.missing
    weekdays = np.array([d.weekday() for d in train.dates()])
    overall = train.present_values()
    if len(overall) == 0:
        raise CoverageError("no present observations")
    overall_median = float(np.median(overall))
    factors = np.empty(7)
    zero_replaced = False
    for wd in range(7):
        vals = train.values[mask & (weekdays == wd)]
        if len(vals) == 0:
            raise CoverageError(f"no observations on weekday {wd} (Monday=0)")
        med = float(np.median(vals))
        f = med / overall_median if overall_median != 0 else 0.0
        if f == 0.0:
            f = 1.0
            zero_replaced = True
        factors[wd] = f
    return SeasonalIndex(factors, zero_replaced)


def _weekday_factors(series: DatedSeries, idx: SeasonalIndex) -> np.ndarray:
    wd0 = series.start_date.weekday()
    offsets = (wd0 + np.arange(len(series))) % 7
    return idx.factors[offsets]


def deseasonalize(series: DatedSeries, idx: SeasonalIndex) -> DatedSeries:
    """Divide each value by its weekday factor."""
    values = series.values / _weekday_factors(series, idx)
    return DatedSeries(series.id, series.start_date, values, series.missing)


def reseasonalize(series: DatedSeries, idx: SeasonalIndex) -> DatedSeries:
    """Multiply each value by its weekday factor; exact inverse of deseasonalize."""
    values = series.values * _weekday_factors(series, idx)
    return DatedSeries(series.id, series.start_date, values, series.missing)


def reseasonalize_values(values: np.ndarray, dates, idx: SeasonalIndex) -> np.ndarray:
    """Reseasonalize a bare forecast vector aligned to explicit dates."""
    offsets = np.array([d.weekday() for d in dates])
    return np.asarray(values, float) * idx.factors[offsets]


@dataclass(frozen=True)
class ScalerParams:
    min: float
    max: float
    degenerate: bool = False

    def __post_init__(self):
        if not (np.isfinite(self.min) and np.isfinite(self.max)):
            raise DataError("scaler bounds must be finite")
        if self.max < self.min:
            raise DataError("scaler max must be >= min")

    def to_dict(self) -> dict:
        return {"min": self.min, "max": self.max, "degenerate": self.degenerate}


def scaler_fit(train) -> ScalerParams:
    x = np.asarray(train, dtype=float)
    x = x[np.isfinite(x)]
    if len(x) == 0:
        raise DataError("cannot fit a scaler on an empty sample")
    lo, hi = float(np.min(x)), float(np.max(x))
    return ScalerParams(lo, hi, degenerate=(hi == lo))


def scaler_transform(x, p: ScalerParams) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if p.degenerate:
        return np.zeros_like(x)
    return (x - p.min) / (p.max - p.min)


def scaler_inverse(x, p: ScalerParams) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if p.degenerate:
        return np.full_like(x, p.min)
    return x * (p.max - p.min) + p.min
