"""Regularly sampled time series and the cleaning applied before fitting."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
from pandas.tseries.frequencies import to_offset
from pandas.tseries.offsets import BaseOffset, Tick

_NATURAL_PERIODS_S = (60.0, 3600.0, 86400.0, 7 * 86400.0)  # minute, hour, day, week


def infer_frequency(timestamps: pd.DatetimeIndex) -> BaseOffset:
    """Sampling step of ``timestamps``.

    Irregular calendars (monthly, quarterly) are recognised by pandas; for
    anything else the smallest gap is used and every gap must be a whole
    multiple of it.
    """
    if len(timestamps) < 2:
        raise ValueError("need at least two timestamps to infer a frequency")
    if len(timestamps) >= 3:
        alias = pd.infer_freq(timestamps)
        if alias is not None:
            return to_offset(alias)
    gaps = np.diff(timestamps.asi8)
    step = int(gaps.min())
    if step <= 0:
        raise ValueError("timestamps must be strictly increasing")
    if np.any(gaps % step):
        raise ValueError("timestamp gaps are not multiples of a common step")
    return to_offset(pd.Timedelta(step, unit="ns"))


@dataclass(frozen=True)
class SeriesView:
    timestamps: pd.DatetimeIndex
    values: np.ndarray  # float, NaN marks a missing observation
    frequency: BaseOffset

    @classmethod
    def build(cls, timestamps, values, frequency=None, regularize: bool = True) -> "SeriesView":
        ts = pd.DatetimeIndex(pd.to_datetime(timestamps))
        if ts.tz is not None:
            ts = ts.tz_convert("UTC").tz_localize(None)
        vals = np.asarray(values, dtype=float)
        if len(ts) != len(vals):
            raise ValueError("timestamps and values differ in length")
        if ts.has_duplicates or not ts.is_monotonic_increasing:
            raise ValueError("timestamps must be strictly increasing")
        freq = to_offset(frequency) if frequency is not None else infer_frequency(ts)
        view = cls(ts, vals, freq)
        return view.regularized() if regularize else view

    @classmethod
    def read_csv(cls, path: str | Path) -> "SeriesView":
        """Read a ``timestamp,value`` file; blank values are missing."""
        frame = pd.read_csv(path)
        if list(frame.columns[:2]) != ["timestamp", "value"]:
            raise ValueError(f"{path}: expected header 'timestamp,value'")
        return cls.build(frame["timestamp"], pd.to_numeric(frame["value"], errors="coerce"))

    def __len__(self):
        return len(self.values)

    def regularized(self) -> "SeriesView":
        """Insert missing rows where the grid has holes."""
        full = pd.date_range(self.timestamps[0], self.timestamps[-1], freq=self.frequency)
        if len(full) == len(self.timestamps) and full.equals(self.timestamps):
            return self
        if not self.timestamps.isin(full).all():
            raise ValueError("timestamps are off the inferred sampling grid")
        vals = pd.Series(self.values, index=self.timestamps).reindex(full).to_numpy()
        return SeriesView(full, vals, self.frequency)

    def with_values(self, values) -> "SeriesView":
        return SeriesView(self.timestamps, np.asarray(values, dtype=float), self.frequency)

    def head(self, n: int) -> "SeriesView":
        return SeriesView(self.timestamps[:n], self.values[:n], self.frequency)

    def tail(self, n: int) -> "SeriesView":
        return SeriesView(self.timestamps[-n:], self.values[-n:], self.frequency)

    def future_index(self, horizon: int) -> pd.DatetimeIndex:
        return pd.date_range(self.timestamps[-1], periods=horizon + 1, freq=self.frequency)[1:]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"timestamp": self.timestamps, "value": self.values})


def cycle_candidates(frequency: BaseOffset) -> list[int]:
    """Plausible cycle lengths (in samples) for a sampling frequency.

    Fixed-width steps get every natural period (minute, hour, day, week) it
    divides; calendar frequencies get their usual annual or weekly cycle.
    """
    if isinstance(frequency, Tick):
        step = pd.Timedelta(frequency).total_seconds()
        out = []
        for period in _NATURAL_PERIODS_S:
            ratio = period / step
            if ratio > 1 and abs(ratio - round(ratio)) < 1e-9:
                out.append(int(round(ratio)))
        return out
    name = frequency.name.split("-")[0].upper()
    table = {"B": [5], "C": [5], "W": [52], "MS": [12], "ME": [12], "M": [12], "BM": [12],
             "BMS": [12], "SM": [24], "SMS": [24], "QS": [4], "QE": [4], "Q": [4], "BQ": [4],
             "BQS": [4]}
    n = max(int(getattr(frequency, "n", 1)), 1)
    return [c // n for c in table.get(name, []) if c % n == 0 and c // n > 1]


def season_length(frequency: BaseOffset) -> int:
    """Lag used by the seasonal-naive yardstick; 1 when nothing seasonal applies."""
    cands = cycle_candidates(frequency)
    if isinstance(frequency, Tick):
        step = pd.Timedelta(frequency).total_seconds()
        # daily data is judged against its weekly cycle, sub-daily against the day
        if step >= 86400.0:
            return cands[0] if cands else 1
        daily = [c for c in cands if abs(c * step - 86400.0) < 1e-6]
        return daily[0] if daily else (cands[-1] if cands else 1)
    return cands[0] if cands else 1


def preprocess(series: SeriesView, transform_log: bool) -> SeriesView:
    """Fill gaps with the median of what was observed, then optionally log1p.

    >>> s = SeriesView.build(pd.date_range("2024-01-01", periods=3), [1.0, np.nan, 3.0])
    >>> preprocess(s, False).values.tolist()
    [1.0, 2.0, 3.0]
    """
    vals = series.values.astype(float)
    observed = vals[np.isfinite(vals)]
    if observed.size == 0:
        raise ValueError("series has no observed values")
    filled = np.where(np.isfinite(vals), vals, np.median(observed))
    if transform_log:
        if np.any(filled < 0):
            raise ValueError("log transform requires non-negative values")
        filled = np.log1p(filled)
    return series.with_values(filled)
