"""Fit a configuration's components one after another and sum their forecasts."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import components as comp
from .config import ForecastConfig
from .metrics import mase, scaled_error
from .series import SeriesView, cycle_candidates, preprocess, season_length


@dataclass
class Decomposition:
    """Training-time view of a fitted configuration (in transformed units)."""

    series: SeriesView
    parts: list[tuple[str, comp.Fitted]]
    residual: np.ndarray

    def component_forecasts(self, horizon: int) -> dict[str, np.ndarray]:
        return {kind: fitted.forecast(horizon) for kind, fitted in self.parts}


def decompose(series: SeriesView, config: ForecastConfig) -> Decomposition:
    prepared = preprocess(series, config.transform_log)
    candidates = cycle_candidates(series.frequency)
    residual = prepared.values.copy()
    parts = []
    for spec in config.components:
        p = spec.params
        if spec.type == "base":
            fitted = comp.fit_base(residual, p["method"], candidates,
                                   int(p.get("window", comp.DEFAULT_ROLLING_WINDOW)))
        elif spec.type == "trend":
            fitted = comp.fit_trend(residual, int(p["degree"]), float(p["damping_factor"]))
        elif spec.type == "seasonal":
            fitted = comp.fit_seasonal(residual, candidates, float(p["window_multiplier"]))
        elif spec.type == "datetime":
            fitted = comp.fit_datetime(residual, prepared.timestamps, p["features"],
                                       prepared.future_index)
        else:
            fitted = comp.fit_residual_correction(residual, int(p["window_size"]),
                                                  float(p["decay_factor"]))
        residual = residual - fitted.fitted
        parts.append((spec.type, fitted))
    return Decomposition(prepared, parts, residual)


def forecast(series: SeriesView, config: ForecastConfig, horizon: int) -> np.ndarray:
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    model = decompose(series, config)
    total = np.zeros(horizon)
    for _, fitted in model.parts:
        total += fitted.forecast(horizon)
    if config.transform_log:
        total = np.expm1(total)
    if config.non_negative:
        total = np.maximum(total, 0.0)
    return total


def validation_length(n: int, horizon: int, min_fraction: float = 0.1) -> int:
    return max(2 * horizon, math.ceil(min_fraction * n))


@dataclass
class Selection:
    best: ForecastConfig
    scores: dict[str, float]          # config name -> validation MASE (NaN when it failed)
    failures: dict[str, str]
    validation_points: int


class SelectionError(RuntimeError):
    pass


def select_config(series: SeriesView, configs, horizon: int,
                  min_fraction: float = 0.1) -> Selection:
    """Pick the configuration with the lowest MASE on a held-back tail.

    Every config is fitted on the head only; ties go to the earlier config.
    """
    configs = list(configs)
    if not configs:
        raise ValueError("no configurations to choose from")
    v = validation_length(len(series), horizon, min_fraction)
    if v >= len(series):
        raise ValueError(f"series of length {len(series)} is too short to hold back {v} points")
    head, tail = series.head(len(series) - v), series.tail(v)
    actual = preprocess(tail, False).values if np.isnan(tail.values).any() else tail.values
    lag = min(season_length(series.frequency), len(head) - 1)
    history = preprocess(head, False).values
    scores, failures = {}, {}
    best, best_score = None, math.inf
    for cfg in configs:
        try:
            pred = forecast(head, cfg, v)
            score, _ = scaled_error(pred, actual, history, max(lag, 1))
            if not math.isfinite(score):
                raise FloatingPointError("non-finite validation error")
        except Exception as exc:  # noqa: BLE001 - one bad config must not sink the rest
            failures[cfg.name] = f"{type(exc).__name__}: {exc}"
            scores[cfg.name] = math.nan
            continue
        scores[cfg.name] = score
        if score < best_score:
            best, best_score = cfg, score
    if best is None:
        raise SelectionError("every configuration failed: " +
                             "; ".join(f"{k}: {v}" for k, v in failures.items()))
    return Selection(best, scores, failures, v)


def forecast_auto(series: SeriesView, configs, horizon: int) -> tuple[np.ndarray, Selection]:
    """Select on the validation tail, then refit the winner on everything."""
    sel = select_config(series, configs, horizon)
    return forecast(series, sel.best, horizon), sel


def holdout_mase(train: SeriesView, actuals, config: ForecastConfig) -> float:
    pred = forecast(train, config, len(actuals))
    history = preprocess(train, False).values
    return mase(pred, actuals, history, max(min(season_length(train.frequency), len(history) - 1), 1))
