"""Additive decomposition forecaster with preset configurations."""

from .components import (fit_base, fit_datetime, fit_residual_correction, fit_seasonal,
                         fit_trend)
from .config import ComponentSpec, ForecastConfig, load_configs
from .metrics import ScaleUndefined, geometric_mean, mase
from .pipeline import (Selection, SelectionError, decompose, forecast, forecast_auto,
                       holdout_mase, select_config, validation_length)
from .presets import PRESETS, preset
from .series import SeriesView, cycle_candidates, preprocess, season_length

__all__ = [
    "ComponentSpec", "ForecastConfig", "PRESETS", "ScaleUndefined", "Selection",
    "SelectionError", "SeriesView", "cycle_candidates", "decompose", "fit_base",
    "fit_datetime", "fit_residual_correction", "fit_seasonal", "fit_trend", "forecast",
    "forecast_auto", "geometric_mean", "holdout_mase", "load_configs", "mase", "preprocess",
    "preset", "season_length", "select_config", "validation_length",
]
