"""Additive forecast components.

Each ``fit_*`` function takes the current residual array (plus whatever
calendar context it needs) and returns a :class:`Fitted` holding the
in-sample contribution and a callable producing the next ``h`` values.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
import pandas as pd

log = logging.getLogger(__name__)

BASE_METHODS = ("seasonal_naive_adaptive", "median_all", "rolling_median")
DEFAULT_ROLLING_WINDOW = 7
HOLIDAY_FEATURE = "_is_holiday_flag"
DEFAULT_HOLIDAY_COUNTRIES = ("US", "DE", "CN", "GB", "CA", "AU")


@dataclass
class Fitted:
    fitted: np.ndarray
    forecast_fn: Callable[[int], np.ndarray]
    info: dict

    def forecast(self, horizon: int) -> np.ndarray:
        return np.asarray(self.forecast_fn(horizon), dtype=float)


def _constant(value: float, n: int, **info) -> Fitted:
    return Fitted(np.full(n, value, dtype=float), lambda h: np.full(h, value, dtype=float), info)


def zero_component(n: int, **info) -> Fitted:
    return _constant(0.0, n, **info)


# -- cycle detection --------------------------------------------------------

def autocorrelation(values: np.ndarray, lag: int) -> float:
    x = np.asarray(values, dtype=float) - np.mean(values)
    denom = float(np.dot(x, x))
    if denom == 0.0 or lag >= len(x):
        return 0.0
    return float(np.dot(x[:-lag], x[lag:]) / denom)


def detect_cycle(values: np.ndarray, candidates: Sequence[int]) -> int | None:
    """Candidate with the strongest autocorrelation among those seen twice."""
    usable = [c for c in candidates if c > 1 and len(values) >= 2 * c]
    if not usable:
        return None
    best, best_acf = usable[0], -math.inf
    for c in usable:
        acf = autocorrelation(values, c)
        if acf > best_acf:
            best, best_acf = c, acf
    return best


# -- base -------------------------------------------------------------------

def fit_base(values: np.ndarray, method: str, candidates: Sequence[int] = (),
             window: int = DEFAULT_ROLLING_WINDOW) -> Fitted:
    y = np.asarray(values, dtype=float)
    n = len(y)
    if n < 1:
        raise ValueError("base component needs at least one value")
    if method == "median_all":
        return _constant(float(np.median(y)), n, method=method)
    if method == "rolling_median":
        if n < window:
            raise ValueError(f"rolling median needs {window} values, got {n}")
        fitted = pd.Series(y).rolling(window, min_periods=1).median().to_numpy()
        level = float(np.median(y[-window:]))
        return Fitted(fitted, lambda h: np.full(h, level), {"method": method, "window": window})
    if method == "seasonal_naive_adaptive":
        cycle = detect_cycle(y, candidates)
        if cycle is None:
            if candidates and n >= min(candidates):
                cycle = min(c for c in candidates if c <= n)
            else:
                log.warning("series too short for a seasonal cycle; using the overall median")
                return _constant(float(np.median(y)), n, method="median_all", fallback=True)
        last = y[-cycle:].copy()
        fitted = np.concatenate([y[:cycle], y[:-cycle]])
        return Fitted(fitted, lambda h: last[np.arange(h) % cycle],
                      {"method": method, "cycle": cycle})
    raise ValueError(f"unknown base method {method!r}")


# -- trend ------------------------------------------------------------------

def fit_trend(values: np.ndarray, degree: int = 1, damping_factor: float = 1.0) -> Fitted:
    """Least-squares polynomial in the time index with damped extrapolation.

    The step ahead ``h`` adds ``(p(n-1+h) - p(n-1)) * damping_factor**h`` to
    the last fitted value.
    """
    if degree not in (0, 1, 2):
        raise ValueError("trend degree must be 0, 1 or 2")
    if not 0 < damping_factor <= 1:
        raise ValueError("damping_factor must lie in (0, 1]")
    y = np.asarray(values, dtype=float)
    n = len(y)
    if n < degree + 1:
        raise ValueError(f"need {degree + 1} points for a degree-{degree} trend")
    t = np.arange(n, dtype=float)
    poly = np.polynomial.Polynomial.fit(t, y, degree) if n > 1 else np.polynomial.Polynomial([y[0]])
    fitted = poly(t)
    end = float(poly(n - 1))

    def forecast(h):
        steps = np.arange(1, h + 1, dtype=float)
        increments = poly(n - 1 + steps) - end
        return end + increments * damping_factor ** steps

    return Fitted(fitted, forecast, {"degree": degree, "damping_factor": damping_factor,
                                     "coefficients": poly.convert().coef.tolist()})


# -- seasonal ---------------------------------------------------------------

def fit_seasonal(values: np.ndarray, candidates: Sequence[int],
                 window_multiplier: float = 1.0) -> Fitted:
    """Per-phase mean over the most recent ``ceil(window_multiplier)`` cycles."""
    if not window_multiplier > 0:
        raise ValueError("window_multiplier must be positive")
    y = np.asarray(values, dtype=float)
    n = len(y)
    cycle = detect_cycle(y, candidates)
    if cycle is None:
        log.warning("no seasonal cycle fits a series of length %d", n)
        return zero_component(n, cycle=None)
    span = min(n, math.ceil(window_multiplier) * cycle)
    idx = np.arange(n - span, n)
    phase = idx % cycle
    profile = np.zeros(cycle)
    counts = np.bincount(phase, minlength=cycle)
    sums = np.bincount(phase, weights=y[idx], minlength=cycle)
    np.divide(sums, counts, out=profile, where=counts > 0)
    fitted = profile[np.arange(n) % cycle]
    return Fitted(fitted, lambda h: profile[(n + np.arange(h)) % cycle],
                  {"cycle": cycle, "profile": profile.tolist()})


# -- calendar features -----------------------------------------------------

@lru_cache(maxsize=None)
def _holiday_calendar(countries: tuple[str, ...], years: tuple[int, ...]):
    import holidays

    days = set()
    for code in countries:
        days.update(holidays.country_holidays(code, years=years).keys())
    return frozenset(days)


def _feature_values(name, stamps: pd.DatetimeIndex) -> np.ndarray:
    if name == "dayofweek":
        return stamps.dayofweek.to_numpy()
    if name == "hour":
        return stamps.hour.to_numpy()
    if name == "month":
        return stamps.month.to_numpy()
    if name == "weekofyear":
        return stamps.isocalendar().week.to_numpy().astype(int)
    if name == "is_weekend":
        return (stamps.dayofweek >= 5).astype(int)
    if name == "is_month_start":
        return stamps.is_month_start.astype(int)
    if name == "is_quarter_start":
        return stamps.is_quarter_start.astype(int)
    if name == "dayofmonth":
        return stamps.day.to_numpy()
    raise ValueError(f"unknown datetime feature {name!r}")


def feature_key(feature) -> str:
    if isinstance(feature, dict):
        return f"{feature.get('name', HOLIDAY_FEATURE)}[{','.join(feature['country_codes'])}]"
    if isinstance(feature, (list, tuple)):
        return "x".join(feature)
    return feature


def feature_categories(feature, stamps: pd.DatetimeIndex) -> list:
    """Category label per timestamp; crossings become tuples."""
    if isinstance(feature, dict):
        if feature.get("name", HOLIDAY_FEATURE) != HOLIDAY_FEATURE:
            raise ValueError(f"unknown datetime feature {feature.get('name')!r}")
        codes = tuple(feature.get("country_codes") or DEFAULT_HOLIDAY_COUNTRIES)
        years = tuple(sorted(set(stamps.year.tolist())))
        days = _holiday_calendar(codes, years)
        return [int(d in days) for d in stamps.date]
    if isinstance(feature, (list, tuple)):
        cols = [_feature_values(f, stamps) for f in feature]
        return list(zip(*(c.tolist() for c in cols)))
    return _feature_values(feature, stamps).tolist()


def validate_feature(feature):
    probe = pd.date_range("2024-01-01", periods=2, freq="D")
    feature_categories(feature, probe)


def fit_datetime(values: np.ndarray, stamps: pd.DatetimeIndex, features: Sequence,
                 future: Callable[[int], pd.DatetimeIndex]) -> Fitted:
    """Median residual per calendar category, features taken in turn.

    Each feature is fitted to what the earlier features left unexplained.
    Categories never seen in training contribute nothing.
    """
    y = np.asarray(values, dtype=float).copy()
    n = len(y)
    for f in features:
        validate_feature(f)
    tables = []
    fitted = np.zeros(n)
    for f in features:
        cats = feature_categories(f, stamps)
        medians = pd.Series(y).groupby(pd.Series(cats, dtype=object)).median().to_dict()
        contribution = np.array([medians[c] for c in cats], dtype=float)
        y -= contribution
        fitted += contribution
        tables.append((f, medians))

    def forecast(h):
        stamps_ahead = future(h)
        out = np.zeros(h)
        for f, medians in tables:
            cats = feature_categories(f, stamps_ahead)
            out += np.array([medians.get(c, 0.0) for c in cats], dtype=float)
        return out

    return Fitted(fitted, forecast, {"features": [feature_key(f) for f, _ in tables]})


# -- residual correction ----------------------------------------------------

def fit_residual_correction(values: np.ndarray, window_size: int, decay_factor: float) -> Fitted:
    """Carry the recent median residual forward, shrinking by ``decay_factor`` per step."""
    if window_size < 1:
        raise ValueError("window_size must be at least 1")
    if not 0 < decay_factor <= 1:
        raise ValueError("decay_factor must lie in (0, 1]")
    y = np.asarray(values, dtype=float)
    level = float(np.median(y[-window_size:])) if len(y) else 0.0
    return Fitted(np.zeros(len(y)),
                  lambda h: level * decay_factor ** np.arange(1, h + 1, dtype=float),
                  {"level": level})
