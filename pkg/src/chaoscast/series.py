"""Panels of daily withdrawal series: loading, validation, calendar features.

A series is a gap-free run of calendar days; days without an observation
carry an explicit missing mask rather than being absent. All containers are
immutable after construction.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    DomainError,
    DuplicateKeyError,
    ParseError,
    SplitError,
    UnimputableError,
)

#: Exogenous calendar columns, in the frozen order used everywhere downstream.
CALENDAR_COLUMNS = (
    "is_monday",
    "is_tuesday",
    "is_wednesday",
    "is_thursday",
    "is_friday",
    "is_saturday",
    "is_sunday",
    "is_weekend_yes",
    "is_weekend_no",
)

DEFAULT_MISSING_THRESHOLD = 110
DEFAULT_HORIZON = 30


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DatedSeries:
    """One daily series with a calendar index and an explicit missing mask.

    ``values[i]`` is the amount observed on ``start_date + i`` days. Masked
    entries hold NaN so that any accidental unmasked use propagates loudly
    instead of being absorbed into a statistic.
    """

    id: str
    start_date: dt.date
    values: np.ndarray
    missing: np.ndarray = field(default=None)

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=float)
        if values.ndim != 1 or len(values) == 0:
            raise DomainError(f"series {self.id!r}: values must be a non-empty 1-d sequence")
        if self.missing is None:
            missing = np.isnan(values)
        else:
            missing = np.ascontiguousarray(self.missing, dtype=bool)
            if missing.shape != values.shape:
                raise DomainError(f"series {self.id!r}: mask shape differs from values")
        present = values[~missing]
        if not np.all(np.isfinite(present)):
            raise DomainError(f"series {self.id!r}: present values must be finite")
        if np.any(present < 0):
            raise DomainError(f"series {self.id!r}: negative amount")
        values = values.copy()
        values[missing] = np.nan
        object.__setattr__(self, "values", _freeze(values))
        object.__setattr__(self, "missing", _freeze(missing))

    def __len__(self) -> int:
        return len(self.values)

    @property
    def end_date(self) -> dt.date:
        return self.start_date + dt.timedelta(days=len(self) - 1)

    @property
    def n_missing(self) -> int:
        return int(self.missing.sum())

    def dates(self) -> list[dt.date]:
        return [self.start_date + dt.timedelta(days=i) for i in range(len(self))]

    def present_values(self) -> np.ndarray:
        return self.values[~self.missing]

    def with_values(self, values: np.ndarray, missing=None) -> "DatedSeries":
        return DatedSeries(self.id, self.start_date, np.asarray(values, float), missing)


@dataclass(frozen=True)
class PanelDataset:
    """A collection of aligned series keyed by id, all spanning date_range."""

    series: dict[str, DatedSeries]
    date_range: tuple[dt.date, dt.date]

    def __post_init__(self):
        first, last = self.date_range
        for sid, s in self.series.items():
            if s.id != sid:
                raise DomainError(f"panel key {sid!r} does not match series id {s.id!r}")
            if s.start_date != first or s.end_date != last:
                raise DomainError(f"series {sid!r} does not span the panel date range")

    def __len__(self) -> int:
        return len(self.series)

    def ids(self) -> list[str]:
        return list(self.series)


def load_panel(source) -> PanelDataset:
    """Parse a ``id,date,amount`` CSV stream into an aligned panel.

    ``source`` may be a path, text stream, or byte stream. Dates are
    ISO-8601; an empty amount marks a missing observation. Days absent
    between a panel's first and last date become missing entries, never
    absent rows.

    Raises ParseError (with the offending line number), DuplicateKeyError,
    or DomainError.
    """
    close = False
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        fh = open(source, "r", encoding="utf-8", newline="")
        close = True
    elif isinstance(source, io.TextIOBase):
        fh = source
    else:  # byte stream
        fh = io.TextIOWrapper(source, encoding="utf-8", newline="")
    try:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty stream: missing header")
        if [h.strip().lower() for h in header] != ["id", "date", "amount"]:
            raise ParseError(f"line 1: expected header 'id,date,amount', got {','.join(header)!r}")
        cells: dict[str, dict[dt.date, float]] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise ParseError(f"line {lineno}: expected 3 fields, got {len(row)}")
            sid, date_text, amount_text = (c.strip() for c in row)
            if not sid:
                raise ParseError(f"line {lineno}: empty id")
            try:
                date = dt.date.fromisoformat(date_text)
            except ValueError:
                raise ParseError(f"line {lineno}: invalid date {date_text!r}")
            if amount_text == "":
                amount = np.nan
            else:
                try:
                    amount = float(amount_text)
                except ValueError:
                    raise ParseError(f"line {lineno}: invalid amount {amount_text!r}")
                if not np.isfinite(amount):
                    raise ParseError(f"line {lineno}: non-finite amount")
                if amount < 0:
                    raise DomainError(f"line {lineno}: negative amount {amount_text}")
            per_series = cells.setdefault(sid, {})
            if date in per_series:
                raise DuplicateKeyError(f"line {lineno}: duplicate entry for ({sid}, {date})")
            per_series[date] = amount
    finally:
        if close:
            fh.close()
    if not cells:
        raise ParseError("stream contains no data rows")

    first = min(min(d) for d in cells.values())
    last = max(max(d) for d in cells.values())
    n = (last - first).days + 1
    series = {}
    for sid in sorted(cells):
        values = np.full(n, np.nan)
        for date, amount in cells[sid].items():
            values[(date - first).days] = amount
        series[sid] = DatedSeries(sid, first, values)
    return PanelDataset(series, (first, last))


def serialize_panel(panel: PanelDataset) -> str:
    """Inverse of load_panel: emit the same CSV contract (missing -> empty)."""
    lines = ["id,date,amount"]
    for sid in panel.ids():
        s = panel.series[sid]
        for i, date in enumerate(s.dates()):
            amount = "" if s.missing[i] else repr(float(s.values[i]))
            lines.append(f"{sid},{date.isoformat()},{amount}")
    return "\n".join(lines) + "\n"


def filter_by_missing(panel: PanelDataset, max_missing: int = DEFAULT_MISSING_THRESHOLD) -> PanelDataset:
    """Drop series with strictly more than ``max_missing`` missing entries."""
    if max_missing < 0:
        raise DomainError("max_missing must be >= 0")
    kept = {sid: s for sid, s in panel.series.items() if s.n_missing <= max_missing}
    return PanelDataset(kept, panel.date_range)


def impute_median(series: DatedSeries, median: float | None = None) -> DatedSeries:
    """Replace missing entries with the series' own median (or a given one).

    ``median`` overrides the per-series median, which lets callers impute
    from a panel-wide statistic instead.
    """
    present = series.present_values()
    if len(present) == 0:
        raise UnimputableError(f"series {series.id!r}: all entries missing")
    if not series.missing.any():
        return series
    fill = float(np.median(present)) if median is None else float(median)
    values = series.values.copy()
    values[series.missing] = fill
    return DatedSeries(series.id, series.start_date, values, np.zeros(len(values), bool))


def calendar_features(start_date: dt.date, n: int) -> np.ndarray:
    """One-hot day-of-week and weekend indicators for n consecutive days.

    Returns an (n, 9) matrix with columns CALENDAR_COLUMNS: row t encodes
    the weekday of ``start_date + t`` days. The seven weekday entries and
    the two weekend entries each form a one-hot block.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    out = np.zeros((n, 9), dtype=float)
    wd0 = start_date.weekday()  # Monday == 0
    for t in range(n):
        wd = (wd0 + t) % 7
        out[t, wd] = 1.0
        if wd >= 5:
            out[t, 7] = 1.0  # is_weekend_yes
        else:
            out[t, 8] = 1.0  # is_weekend_no
    return out


def split_train_test(series: DatedSeries, horizon: int = DEFAULT_HORIZON) -> tuple[DatedSeries, DatedSeries]:
    """Hold out the final ``horizon`` days as the test span."""
    if horizon < 1:
        raise SplitError("horizon must be >= 1")
    if horizon >= len(series):
        raise SplitError(f"horizon {horizon} >= series length {len(series)}")
    cut = len(series) - horizon
    train = DatedSeries(series.id, series.start_date, series.values[:cut], series.missing[:cut])
    test_start = series.start_date + dt.timedelta(days=cut)
    test = DatedSeries(series.id, test_start, series.values[cut:], series.missing[cut:])
    return train, test
