"""Forecasting benchmark over the shipped synthetic datasets.

Hill climbing sees only the training files: each config is fitted on the
head of every training series and scored by MASE on that series' own
validation tail.  The holdout files are read only by ``holdout_score``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from ..candidates import Candidate
from ..forecaster import ForecastConfig, SeriesView, forecast, preprocess, season_length
from ..forecaster.metrics import scaled_error
from ..forecaster.pipeline import validation_length
from ..forecaster.presets import HOLIDAYS
from .base import TRAIN_HOLDOUT, InputFile, ScorableTask, forecast_task_score

DATA = resources.files("scorch.tasks") / "data" / "forecast"
MANIFEST = "forecast.json"

ROOT_CONFIG = {
    "base_method": "median_all",
    "use_trend": False, "trend_degree": 1, "trend_damping": 0.9,
    "use_seasonal": False, "seasonal_window": 3,
    "use_datetime": False,
    "use_residual": False, "residual_window": 14, "residual_decay": 0.9,
    "transform_log": False, "non_negative": False,
}

_TOGGLE = {"law": "categorical", "choices": [False, True]}
SCHEDULE = {
    "base_method": {"law": "categorical",
                    "choices": ["median_all", "rolling_median", "seasonal_naive_adaptive"]},
    "use_trend": _TOGGLE,
    "trend_degree": {"law": "additive", "steps": [1], "bounds": [0, 2], "integer": True},
    "trend_damping": {"law": "additive", "steps": [0.05, 0.01], "bounds": [0.5, 1.0]},
    "use_seasonal": _TOGGLE,
    "seasonal_window": {"law": "additive", "steps": [1], "bounds": [1, 10], "integer": True},
    "use_datetime": _TOGGLE,
    "use_residual": _TOGGLE,
    "residual_window": {"law": "additive", "steps": [1, 4], "bounds": [1, 60], "integer": True},
    "residual_decay": {"law": "additive", "steps": [0.05, 0.01], "bounds": [0.5, 1.0]},
    "transform_log": _TOGGLE,
    "non_negative": _TOGGLE,
}

DATETIME_FEATURES = [["dayofweek", "hour"], "month", "is_weekend", HOLIDAYS]


def flat_to_config(flat: dict, name: str = "candidate") -> ForecastConfig:
    """Turn the mutator's flat key/value view into a component list."""
    unknown = set(flat) - set(ROOT_CONFIG)
    if unknown:
        raise KeyError(f"unknown forecast config keys {sorted(unknown)}")
    f = {**ROOT_CONFIG, **flat}
    comps = [{"type": "base", "method": f["base_method"]}]
    if f["use_trend"]:
        comps.append({"type": "trend", "method": "polynomial", "degree": int(f["trend_degree"]),
                      "damping_factor": float(f["trend_damping"])})
    if f["use_datetime"]:
        comps.append({"type": "datetime", "features": DATETIME_FEATURES})
    if f["use_seasonal"]:
        comps.append({"type": "seasonal", "method": "average",
                      "window_multiplier": float(f["seasonal_window"])})
    if f["use_residual"]:
        comps.append({"type": "residual", "method": "median",
                      "window_size": int(f["residual_window"]),
                      "decay_factor": float(f["residual_decay"])})
    return ForecastConfig(name, tuple(comps), bool(f["transform_log"]), bool(f["non_negative"]))


@dataclass
class Dataset:
    name: str
    horizon: int
    train: SeriesView


def _check_digest(path: Path, expected: str):
    actual = hashlib.sha256(path.read_bytes()).hexdigest()
    if actual != expected:
        raise ValueError(f"{path.name}: digest mismatch")


def validation_mase(series: SeriesView, config: ForecastConfig, horizon: int) -> float:
    """Fit on the head of ``series`` and score the held-back tail."""
    v = validation_length(len(series), horizon)
    head, tail = series.head(len(series) - v), series.tail(v)
    history = preprocess(head, False).values
    actual = preprocess(tail, False).values
    pred = forecast(head, config, v)
    lag = max(min(season_length(series.frequency), len(history) - 1), 1)
    value, _ = scaled_error(pred, actual, history, lag)
    return max(value, np.finfo(float).tiny)


_HARNESS = '''\
import json
import math

import candidate
from scorch.forecaster import SeriesView
from scorch.tasks.base import forecast_task_score
from scorch.tasks.forecasting import program_validation_mase

manifest = json.load(open("inputs/{manifest}"))
scores = []
for entry in manifest["datasets"]:
    series = SeriesView.read_csv("inputs/" + entry["train"]["file"])
    scores.append(program_validation_mase(series, candidate.forecast, entry["horizon"]))
print("SCORE " + repr(forecast_task_score(scores)))
'''

_ROOT_PROGRAM = '''\
from scorch.forecaster import forecast as run, preset


def forecast(series, horizon):
    return run(series, preset("seasonal_naive_baseline"), horizon)
'''


def program_validation_mase(series: SeriesView, fn, horizon: int) -> float:
    v = validation_length(len(series), horizon)
    head, tail = series.head(len(series) - v), series.tail(v)
    pred = np.asarray(fn(head, v), dtype=float)
    if pred.shape != (v,) or not np.all(np.isfinite(pred)):
        raise ValueError("forecast must return one finite value per step")
    history = preprocess(head, False).values
    lag = max(min(season_length(series.frequency), len(history) - 1), 1)
    value, _ = scaled_error(pred, preprocess(tail, False).values, history, lag)
    return max(value, np.finfo(float).tiny)


class ForecastTask(ScorableTask):
    def __init__(self, data_dir: str | Path | None = None):
        root = Path(str(data_dir or DATA))
        doc = json.loads((root / MANIFEST).read_text())
        self.datasets: list[Dataset] = []
        self._holdout: dict[str, Path] = {}
        inputs = [InputFile.of(root / MANIFEST)]
        for entry in doc["datasets"]:
            train = root / entry["train"]["file"]
            _check_digest(train, entry["train"]["sha256"])
            self.datasets.append(Dataset(entry["name"], int(entry["horizon"]),
                                         SeriesView.read_csv(train)))
            self._holdout[entry["name"]] = root / entry["holdout"]["file"]
            inputs.append(InputFile.of(train))
        self._holdout_digests = {e["name"]: e["holdout"]["sha256"] for e in doc["datasets"]}
        super().__init__(
            task_id="forecast",
            description=("Forecast each series over its horizon. Score is the negated "
                         "geometric mean of MASE on each training series' validation tail."),
            root_candidate=Candidate.config(ROOT_CONFIG),
            schedule=SCHEDULE,
            input_manifest=inputs,
            split_policy=TRAIN_HOLDOUT,
            root_program=_ROOT_PROGRAM,
            program_harness=_HARNESS.format(manifest=MANIFEST),
        )

    def score_config(self, config: dict) -> float:
        cfg = flat_to_config(config)
        return forecast_task_score([validation_mase(d.train, cfg, d.horizon)
                                    for d in self.datasets])

    def holdout_score(self, config: dict) -> float:
        cfg = flat_to_config(config)
        values = []
        for d in self.datasets:
            path = self._holdout[d.name]
            _check_digest(path, self._holdout_digests[d.name])
            actual = preprocess(SeriesView.read_csv(path), False).values
            history = preprocess(d.train, False).values
            pred = forecast(d.train, cfg, len(actual))
            lag = max(min(season_length(d.train.frequency), len(history) - 1), 1)
            value, _ = scaled_error(pred, actual, history, lag)
            values.append(max(value, np.finfo(float).tiny))
        return forecast_task_score(values)


def forecast_task(data_dir: str | Path | None = None) -> ForecastTask:
    return ForecastTask(data_dir)
