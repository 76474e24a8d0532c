from __future__ import annotations

import numpy as np


class ScaleUndefined(ZeroDivisionError):
    """The training series has no seasonal-naive error to scale by."""


def naive_scale(training, season_length: int) -> float:
    y = np.asarray(training, dtype=float)
    if season_length < 1:
        raise ValueError("season_length must be positive")
    if len(y) < season_length + 1:
        raise ValueError(f"need at least {season_length + 1} training points")
    return float(np.mean(np.abs(y[season_length:] - y[:-season_length])))


def mase(forecast, actuals, training, season_length: int) -> float:
    """Forecast MAE over the in-sample seasonal-naive MAE.

    >>> mase([3.0, 5.0], [2.0, 4.0], [0.0, 1.0, 2.0], 1)
    1.0
    """
    f = np.asarray(forecast, dtype=float)
    a = np.asarray(actuals, dtype=float)
    if f.shape != a.shape:
        raise ValueError("forecast and actuals differ in shape")
    scale = naive_scale(training, season_length)
    if scale == 0.0:
        raise ScaleUndefined("seasonal-naive error of the training series is zero")
    return float(np.mean(np.abs(f - a)) / scale)


def scaled_error(forecast, actuals, training, season_length: int) -> tuple[float, bool]:
    """MASE, or plain MAE flagged ``True`` when the scale is zero."""
    try:
        return mase(forecast, actuals, training, season_length), False
    except ScaleUndefined:
        err = np.abs(np.asarray(forecast, float) - np.asarray(actuals, float))
        return float(np.mean(err)), True


def geometric_mean(values) -> float:
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("geometric mean of nothing")
    if np.any(v <= 0):
        raise ValueError("geometric mean needs positive values")
    return float(np.exp(np.mean(np.log(v))))
