"""Figures written next to the delimited reports (PNG, headless backend)."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_META = {"Software": None}  # keep the files free of version stamps


def _save(fig, path: Path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=110, bbox_inches="tight", metadata=_META)
    plt.close(fig)
    return path


def breakthrough_figure(series, path, title: str = "") -> Path:
    """Running best score against node count, breakthroughs marked."""
    counts = [c for c, s, _ in series if math.isfinite(s)]
    best = [s for _, s, _ in series if math.isfinite(s)]
    marks = [(c, s) for c, s, b in series if b and math.isfinite(s)]
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    if counts:
        ax.step(counts, best, where="post", color="tab:blue", lw=1.5)
        ax.scatter(*zip(*marks), color="tab:red", s=14, zorder=3, label="breakthrough")
        ax.legend(loc="lower right", frameon=False)
    ax.set_xlabel("nodes")
    ax.set_ylabel("best score so far")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    return _save(fig, path)


def integrals_figure(rows, path, threshold: float = 0.03) -> Path:
    """Fractional error per integral on a log axis with the pass line."""
    names = [r["spec_id"] for r in rows]
    errs = [r["fractional_error"] if math.isfinite(r["fractional_error"]) else 1e3 for r in rows]
    errs = [max(e, 1e-17) for e in errs]
    colors = ["tab:green" if e < threshold else "tab:red" for e in errs]
    fig, ax = plt.subplots(figsize=(max(6.0, 0.35 * len(rows)), 3.6))
    ax.bar(range(len(rows)), errs, color=colors)
    ax.axhline(threshold, color="k", ls="--", lw=1)
    ax.set_yscale("log")
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels(names, rotation=70, fontsize=7)
    ax.set_ylabel("fractional error")
    return _save(fig, path)


def forecast_figure(timestamps, history, future_stamps, forecast, path, title: str = "",
                    tail: int = 400) -> Path:
    fig, ax = plt.subplots(figsize=(7.0, 3.6))
    ax.plot(timestamps[-tail:], history[-tail:], color="0.35", lw=1, label="history")
    ax.plot(future_stamps, forecast, color="tab:orange", lw=1.5, label="forecast")
    ax.legend(frameon=False)
    ax.set_title(title)
    fig.autofmt_xdate()
    return _save(fig, path)
