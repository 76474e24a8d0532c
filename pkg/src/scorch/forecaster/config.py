"""Forecast configurations: which components to fit, in which order."""

from __future__ import annotations

import ast
import json
from dataclasses import dataclass, field
from pathlib import Path

from .components import BASE_METHODS, validate_feature

COMPONENT_TYPES = ("base", "trend", "seasonal", "datetime", "residual")

_DEFAULTS = {
    "base": {"method": "median_all"},
    "trend": {"method": "polynomial", "degree": 1, "damping_factor": 1.0},
    "seasonal": {"method": "average", "window_multiplier": 1.0},
    "datetime": {"features": []},
    "residual": {"method": "median", "window_size": 7, "decay_factor": 1.0},
}


@dataclass(frozen=True)
class ComponentSpec:
    type: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.type not in COMPONENT_TYPES:
            raise ValueError(f"unknown component type {self.type!r}")
        merged = {**_DEFAULTS[self.type], **self.params}
        object.__setattr__(self, "params", merged)
        _check(self.type, merged)

    def __getitem__(self, key):
        return self.params[key]

    @classmethod
    def from_dict(cls, d: dict) -> "ComponentSpec":
        d = dict(d)
        return cls(d.pop("type"), d)

    def to_dict(self) -> dict:
        return {"type": self.type, **self.params}


def _check(kind: str, p: dict):
    if kind == "base":
        if p["method"] not in BASE_METHODS:
            raise ValueError(f"unknown base method {p['method']!r}")
        if "window" in p and int(p["window"]) < 1:
            raise ValueError("rolling window must be at least 1")
    elif kind == "trend":
        if p["method"] != "polynomial":
            raise ValueError("trend method must be 'polynomial'")
        if p["degree"] not in (0, 1, 2):
            raise ValueError("trend degree must be 0, 1 or 2")
        if not 0 < p["damping_factor"] <= 1:
            raise ValueError("damping_factor must lie in (0, 1]")
    elif kind == "seasonal":
        if p["method"] != "average":
            raise ValueError("seasonal method must be 'average'")
        if not p["window_multiplier"] > 0:
            raise ValueError("window_multiplier must be positive")
    elif kind == "datetime":
        for f in p["features"]:
            validate_feature(f)
    elif kind == "residual":
        if p["method"] != "median":
            raise ValueError("residual method must be 'median'")
        if int(p["window_size"]) < 1:
            raise ValueError("window_size must be at least 1")
        if not 0 < p["decay_factor"] <= 1:
            raise ValueError("decay_factor must lie in (0, 1]")


@dataclass(frozen=True)
class ForecastConfig:
    name: str
    components: tuple[ComponentSpec, ...]
    transform_log: bool = False
    non_negative: bool = False
    version: int = 4
    description: str = ""

    def __post_init__(self):
        comps = tuple(c if isinstance(c, ComponentSpec) else ComponentSpec.from_dict(c)
                      for c in self.components)
        if not comps:
            raise ValueError("a configuration needs at least one component")
        kinds = [c.type for c in comps]
        dupes = sorted({k for k in kinds if kinds.count(k) > 1})
        if dupes:
            raise ValueError(f"duplicate component types: {dupes}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_dict(cls, d: dict) -> "ForecastConfig":
        return cls(name=d["name"], components=tuple(d["components"]),
                   transform_log=bool(d.get("transform_log", False)),
                   non_negative=bool(d.get("non_negative", False)),
                   version=int(d.get("version", 4)), description=d.get("description", ""))

    def to_dict(self) -> dict:
        return {"name": self.name, "description": self.description,
                "components": [c.to_dict() for c in self.components],
                "transform_log": self.transform_log, "non_negative": self.non_negative,
                "version": self.version}


def load_configs(path: str | Path) -> list[ForecastConfig]:
    """Read a list of configurations from JSON or a Python literal."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        body = text.split("=", 1)[1] if text.lstrip().startswith("config_list") else text
        data = ast.literal_eval(body.strip())
    if isinstance(data, dict):
        data = [data]
    return [ForecastConfig.from_dict(d) for d in data]
