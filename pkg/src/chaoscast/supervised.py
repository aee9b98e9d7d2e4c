"""Supervised dataset assembly and multi-step forecasting.

Couples the reconstructed lag coordinates with the nine calendar one-hots,
aligned to target dates, and unrolls fitted models over a horizon either
recursively (forecast feedback) or one step ahead from actuals.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field

import numpy as np

from .chaos import reconstruct_phase_space
from .errors import DataError, NumericError
from .preprocess import ScalerParams, SeasonalIndex, reseasonalize_values, scaler_inverse
from .series import CALENDAR_COLUMNS, DatedSeries, calendar_features


def lag_feature_names(tau: int, m: int) -> list[str]:
    """Column labels for the lag block, oldest first: lag k = t - k."""
    return [f"lag_{(m - 1 - j) * tau + 1}" for j in range(m)]


@dataclass(frozen=True)
class SupervisedDataset:
    """Design matrix of lag coordinates (+ optional calendar block) and targets."""

    X: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...]
    target_dates: tuple[dt.date, ...]
    n_lags: int

    def __post_init__(self):
        X = np.ascontiguousarray(self.X, dtype=float)
        y = np.ascontiguousarray(self.y, dtype=float)
        if X.ndim != 2 or y.ndim != 1:
            raise DataError("X must be 2-d and y 1-d")
        if not (len(X) == len(y) == len(self.target_dates)):
            raise DataError("X rows, y length, and target_dates length must agree")
        if X.shape[1] != len(self.feature_names):
            raise DataError("feature_names must label every column")
        has_exog = X.shape[1] == self.n_lags + len(CALENDAR_COLUMNS)
        if not has_exog and X.shape[1] != self.n_lags:
            raise DataError("column count must be n_lags or n_lags + 9")
        if has_exog:
            if tuple(self.feature_names[-9:]) != CALENDAR_COLUMNS:
                raise DataError("the last nine feature names must be the calendar columns")
            block = X[:, self.n_lags :]
            if not (
                np.all(block.sum(axis=1) == 2.0)
                and np.all(block[:, :7].sum(axis=1) == 1.0)
                and np.all(np.isin(block, (0.0, 1.0)))
            ):
                raise DataError("calendar block rows must be valid one-hot pairs")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "target_dates", tuple(self.target_dates))

    def __len__(self) -> int:
        return len(self.y)

    @property
    def has_exogenous(self) -> bool:
        return self.X.shape[1] > self.n_lags

    def slice(self, start: int, stop: int) -> "SupervisedDataset":
        return SupervisedDataset(
            self.X[start:stop],
            self.y[start:stop],
            self.feature_names,
            self.target_dates[start:stop],
            self.n_lags,
        )


def assemble_supervised(series: DatedSeries, tau: int, m: int, use_exogenous: bool = True) -> SupervisedDataset:
    """Build the regression dataset from a fully-observed (scaled) series.

    The first m columns are the reconstructed lag coordinates; with
    use_exogenous the nine calendar one-hots of each target date follow.
    """
    if series.missing.any():
        raise DataError(f"series {series.id!r} still has missing entries; impute first")
    X_lags, y = reconstruct_phase_space(series.values, tau, m)
    window = (m - 1) * tau
    n = len(y)
    target_dates = tuple(series.start_date + dt.timedelta(days=window + 1 + i) for i in range(n))
    names = lag_feature_names(tau, m)
    if use_exogenous:
        exog = calendar_features(target_dates[0], n)
        X = np.hstack([X_lags, exog])
        names = names + list(CALENDAR_COLUMNS)
    else:
        X = X_lags
    return SupervisedDataset(X, y, tuple(names), target_dates, n_lags=m)


@dataclass(frozen=True)
class ForecastTrace:
    """A horizon of forecasts in currency units, with actuals when known."""

    dates: tuple[dt.date, ...]
    predicted: np.ndarray
    actual: np.ndarray | None
    mode: str

    def __post_init__(self):
        pred = np.ascontiguousarray(self.predicted, dtype=float)
        if not np.all(np.isfinite(pred)):
            raise NumericError("forecast trace contains non-finite predictions")
        if len(pred) != len(self.dates):
            raise DataError("dates and predictions must align")
        for a, b in zip(self.dates, self.dates[1:]):
            if (b - a).days != 1:
                raise DataError("forecast dates must be consecutive")
        pred.setflags(write=False)
        object.__setattr__(self, "predicted", pred)
        object.__setattr__(self, "dates", tuple(self.dates))
        if self.actual is not None:
            act = np.ascontiguousarray(self.actual, dtype=float)
            if len(act) != len(pred):
                raise DataError("actuals must align with predictions")
            act.setflags(write=False)
            object.__setattr__(self, "actual", act)

    def __len__(self) -> int:
        return len(self.predicted)

    def to_csv(self) -> str:
        lines = ["date,predicted,actual"]
        for i, d in enumerate(self.dates):
            actual = "" if self.actual is None else repr(float(self.actual[i]))
            lines.append(f"{d.isoformat()},{float(self.predicted[i])!r},{actual}")
        return "\n".join(lines) + "\n"


def forecast_horizon(
    model,
    history: DatedSeries,
    tau: int,
    m: int,
    horizon: int,
    mode: str = "recursive",
    inverses: tuple[ScalerParams | None, SeasonalIndex | None] = (None, None),
    use_exogenous: bool = True,
    actuals: DatedSeries | None = None,
) -> ForecastTrace:
    """Forecast ``horizon`` days past the end of ``history``.

    ``history`` is in model space (deseasonalized and scaled); recursive
    mode feeds each prediction back into the lag window, one_step mode
    reads lag coordinates from ``actuals`` (also in model space). Calendar
    features always come from the true future dates. Outputs are restored
    to currency units via the inverse scaler then the seasonal index.
    """
    if horizon < 1:
        raise DataError("horizon must be >= 1")
    if mode not in ("recursive", "one_step"):
        raise DataError(f"unknown forecast mode {mode!r}")
    if history.missing.any():
        raise DataError("history must be fully observed")
    window = (m - 1) * tau
    if len(history) < window + 1:
        raise DataError(f"history of length {len(history)} cannot fill a (tau={tau}, m={m}) lag window")
    if mode == "one_step":
        if actuals is None:
            raise DataError("one_step mode requires actuals covering the horizon")
        if len(actuals) < horizon:
            raise DataError(f"actuals cover {len(actuals)} days, horizon is {horizon}")
        if actuals.missing[:horizon].any():
            raise DataError("one_step actuals must be fully observed")

    start = history.end_date + dt.timedelta(days=1)
    future_dates = [start + dt.timedelta(days=i) for i in range(horizon)]
    exog = calendar_features(start, horizon) if use_exogenous else None

    working = list(history.values)
    scaled_preds = np.empty(horizon)
    for step in range(horizon):
        lags = [working[-1 - (m - 1 - j) * tau] for j in range(m)]
        row = np.array(lags + (list(exog[step]) if use_exogenous else []), dtype=float)
        pred = float(np.asarray(model.predict(row[None, :])).ravel()[0])
        if not np.isfinite(pred):
            raise NumericError(f"non-finite prediction at step {step + 1}")
        scaled_preds[step] = pred
        working.append(pred if mode == "recursive" else float(actuals.values[step]))

    out = scaled_preds
    scaler, seasonal = inverses
    if scaler is not None:
        out = scaler_inverse(out, scaler)
    if seasonal is not None:
        out = reseasonalize_values(out, future_dates, seasonal)
    actual_values = None
    if actuals is not None:
        raw = actuals.values[:horizon]
        restored = raw
        if scaler is not None:
            restored = scaler_inverse(restored, scaler)
        if seasonal is not None:
            restored = reseasonalize_values(restored, future_dates, seasonal)
        actual_values = restored
    return ForecastTrace(tuple(future_dates), out, actual_values, mode)
