"""Built-in scorable tasks."""

from __future__ import annotations

from .base import (TRAIN_HOLDOUT, TRAIN_ONLY, InputFile, ScorableTask, forecast_task_score,
                   integral_score, integral_task_score)
from .forecasting import ForecastTask, forecast_task
from .integrals import IntegralSpec, IntegralsTask, integrals_task, load_specs
from .synthetic import SyntheticTask, synthetic_task

REGISTRY = {
    "synthetic": synthetic_task,
    "integrals": integrals_task,
    "forecast": forecast_task,
}


def get_task(task_id: str, **kwargs) -> ScorableTask:
    try:
        factory = REGISTRY[task_id]
    except KeyError:
        raise KeyError(f"unknown task {task_id!r}; known: {', '.join(sorted(REGISTRY))}") from None
    return factory(**kwargs)


__all__ = [
    "REGISTRY", "TRAIN_HOLDOUT", "TRAIN_ONLY", "ForecastTask", "InputFile", "IntegralSpec",
    "IntegralsTask", "ScorableTask", "SyntheticTask", "forecast_task", "forecast_task_score",
    "get_task", "integral_score", "integral_task_score", "integrals_task", "load_specs",
    "synthetic_task",
]
