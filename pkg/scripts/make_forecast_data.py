"""Generate the synthetic forecasting datasets shipped with the package.

Each dataset is written as ``<name>_train.csv`` and ``<name>_holdout.csv``
(header ``timestamp,value``, RFC 3339 timestamps) plus an entry in
``forecast.json`` recording horizon, frequency and file digests.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import holidays
import numpy as np
import pandas as pd

OUT = Path(__file__).resolve().parents[1] / "src" / "scorch" / "tasks" / "data" / "forecast"
SEED = 20250918


def daily_retail(rng):
    idx = pd.date_range("2021-01-01", periods=3 * 365, freq="D")
    t = np.arange(len(idx))
    weekly = np.array([-6.0, -2.0, 0.0, 1.0, 4.0, 9.0, -6.0])[idx.dayofweek]
    us = holidays.country_holidays("US", years=sorted(set(idx.year)))
    bump = np.array([12.0 if d in us else 0.0 for d in idx.date])
    y = 60 + 0.02 * t + weekly + bump + 4 * np.sin(2 * np.pi * t / 365.25) + rng.normal(0, 2.5, len(t))
    return idx, y, 28


def hourly_load(rng):
    idx = pd.date_range("2023-03-01", periods=24 * 7 * 10, freq="h")
    t = np.arange(len(idx))
    daily = 8 * np.sin(2 * np.pi * (idx.hour - 7) / 24) + 3 * np.sin(4 * np.pi * idx.hour / 24)
    weekend = np.where(idx.dayofweek >= 5, -5.0, 0.0)
    y = 40 + daily + weekend + 0.002 * t + rng.normal(0, 1.5, len(t))
    return idx, y, 48


def monthly_sales(rng):
    idx = pd.date_range("2010-01-01", periods=12 * 14, freq="MS")
    t = np.arange(len(idx))
    seasonal = 15 * np.sin(2 * np.pi * (idx.month - 3) / 12)
    y = 200 + 1.1 * t + seasonal + rng.normal(0, 6, len(t))
    return idx, y, 12


def weekly_counts(rng):
    idx = pd.date_range("2019-01-06", periods=52 * 5, freq="W-SUN")
    t = np.arange(len(idx))
    rate = np.exp(2.0 + 0.6 * np.sin(2 * np.pi * t / 52.18) + 0.002 * t)
    return idx, rng.poisson(rate).astype(float), 13


DATASETS = {"daily_retail": daily_retail, "hourly_load": hourly_load,
            "monthly_sales": monthly_sales, "weekly_counts": weekly_counts}


def write_csv(path: Path, idx, values):
    frame = pd.DataFrame({"timestamp": idx.strftime("%Y-%m-%dT%H:%M:%SZ"),
                          "value": ["" if np.isnan(v) else repr(round(float(v), 6)) for v in values]})
    frame.to_csv(path, index=False, lineterminator="\n")


def digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)
    entries = []
    for name, make in DATASETS.items():
        idx, y, horizon = make(rng)
        y = np.array(y, dtype=float)
        # a sprinkling of missing observations in the training part
        holes = rng.choice(len(y) - horizon, size=max(1, len(y) // 200), replace=False)
        y[holes] = np.nan
        train, hold = OUT / f"{name}_train.csv", OUT / f"{name}_holdout.csv"
        write_csv(train, idx[:-horizon], y[:-horizon])
        write_csv(hold, idx[-horizon:], y[-horizon:])
        entries.append({"name": name, "horizon": horizon, "frequency": pd.infer_freq(idx),
                        "train": {"file": train.name, "sha256": digest(train)},
                        "holdout": {"file": hold.name, "sha256": digest(hold)}})
        print(name, len(idx), "points, horizon", horizon)
    doc = {"schema_version": 1, "seed": SEED,
           "description": "Synthetic series with trend, cycles, calendar effects and noise.",
           "datasets": entries}
    (OUT / "forecast.json").write_text(json.dumps(doc, indent=2) + "\n")


if __name__ == "__main__":
    main()
