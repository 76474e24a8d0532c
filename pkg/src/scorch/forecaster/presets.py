"""The eight built-in configurations.

The first three are the published examples; the other five fill in the
grid of log transform on/off against calendar-heavy and trend-heavy models.
"""

from __future__ import annotations

from .components import DEFAULT_HOLIDAY_COUNTRIES, HOLIDAY_FEATURE
from .config import ForecastConfig

HOLIDAYS = {"name": HOLIDAY_FEATURE, "country_codes": list(DEFAULT_HOLIDAY_COUNTRIES)}

_RAW = [
    {
        "name": "seasonal_naive_baseline",
        "description": "Repeat the last detected cycle.",
        "components": [{"type": "base", "method": "seasonal_naive_adaptive"}],
        "transform_log": False, "non_negative": False, "version": 4,
    },
    {
        "name": "additive_damped_linear_LogTransform",
        "description": "Median level, damped linear trend, seasonal profile and residual carry-over on log1p values.",
        "components": [
            {"type": "base", "method": "median_all"},
            {"type": "trend", "method": "polynomial", "degree": 1, "damping_factor": 0.90},
            {"type": "seasonal", "method": "average", "window_multiplier": 5.0},
            {"type": "residual", "method": "median", "window_size": 18, "decay_factor": 0.90},
        ],
        "transform_log": True, "non_negative": True, "version": 4,
    },
    {
        "name": "date_features_seasonal",
        "description": "Median level plus calendar effects, seasonal profile and residual carry-over.",
        "components": [
            {"type": "base", "method": "median_all"},
            {"type": "datetime", "features": [
                ["dayofweek", "hour"], "month", "is_month_start", "weekofyear",
                "is_weekend", "is_quarter_start", HOLIDAYS,
            ]},
            {"type": "seasonal", "method": "average", "window_multiplier": 4.0},
            {"type": "residual", "method": "median", "window_size": 14, "decay_factor": 0.92},
        ],
        "transform_log": False, "non_negative": False, "version": 4,
    },
    {
        "name": "date_features_LogTransform",
        "description": "Calendar-driven model on log1p values.",
        "components": [
            {"type": "base", "method": "median_all"},
            {"type": "datetime", "features": [["dayofweek", "hour"], "month", "is_weekend", HOLIDAYS]},
            {"type": "seasonal", "method": "average", "window_multiplier": 3.0},
            {"type": "residual", "method": "median", "window_size": 14, "decay_factor": 0.90},
        ],
        "transform_log": True, "non_negative": True, "version": 4,
    },
    {
        "name": "damped_quadratic_trend",
        "description": "Curved trend with strong damping and a short seasonal window.",
        "components": [
            {"type": "base", "method": "median_all"},
            {"type": "trend", "method": "polynomial", "degree": 2, "damping_factor": 0.85},
            {"type": "seasonal", "method": "average", "window_multiplier": 3.0},
            {"type": "residual", "method": "median", "window_size": 7, "decay_factor": 0.85},
        ],
        "transform_log": False, "non_negative": False, "version": 4,
    },
    {
        "name": "rolling_level_linear_LogTransform",
        "description": "Recent median level with a lightly damped trend on log1p values.",
        "components": [
            {"type": "base", "method": "rolling_median", "window": 14},
            {"type": "trend", "method": "polynomial", "degree": 1, "damping_factor": 0.95},
            {"type": "seasonal", "method": "average", "window_multiplier": 5.0},
        ],
        "transform_log": True, "non_negative": True, "version": 4,
    },
    {
        "name": "trend_with_date_features",
        "description": "Damped linear trend followed by calendar effects.",
        "components": [
            {"type": "base", "method": "median_all"},
            {"type": "trend", "method": "polynomial", "degree": 1, "damping_factor": 0.90},
            {"type": "datetime", "features": ["dayofweek", "hour", "month", HOLIDAYS]},
            {"type": "residual", "method": "median", "window_size": 10, "decay_factor": 0.90},
        ],
        "transform_log": False, "non_negative": False, "version": 4,
    },
    {
        "name": "undamped_linear_seasonal",
        "description": "Straight-line trend plus a long seasonal average.",
        "components": [
            {"type": "base", "method": "median_all"},
            {"type": "trend", "method": "polynomial", "degree": 1, "damping_factor": 1.0},
            {"type": "seasonal", "method": "average", "window_multiplier": 8.0},
        ],
        "transform_log": False, "non_negative": False, "version": 4,
    },
]

PRESETS: tuple[ForecastConfig, ...] = tuple(ForecastConfig.from_dict(d) for d in _RAW)


def preset(name: str) -> ForecastConfig:
    for cfg in PRESETS:
        if cfg.name == name:
            return cfg
    raise KeyError(f"no preset named {name!r}")
