"""The task contract shared by every built-in benchmark."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ..candidates import PARAMETER_CONFIG, PROGRAM_TEXT, Candidate
from ..generators import MUTATOR

TRAIN_ONLY = "train_only"
TRAIN_HOLDOUT = "train_holdout"

NEAR_ZERO_ANSWER = 1e-12


@dataclass(frozen=True)
class InputFile:
    name: str
    path: Path
    digest: str
    split: str = "train"

    @classmethod
    def of(cls, path: Path, split: str = "train", name: str | None = None) -> "InputFile":
        digest = hashlib.sha256(Path(path).read_bytes()).hexdigest()
        return cls(name or Path(path).name, Path(path), digest, split)

    def to_dict(self) -> dict:
        return {"name": self.name, "digest": self.digest, "split": self.split}


@dataclass
class ScorableTask:
    """A problem plus the means to score candidate solutions to it.

    ``score_config`` is the hill-climbing scorer and only ever sees
    training data.  Program candidates are scored by running
    ``program_harness`` beside the candidate with ``input_manifest`` staged
    read-only under ``inputs/``.
    """

    task_id: str
    description: str
    root_candidate: Candidate
    schedule: dict
    input_manifest: list[InputFile] = field(default_factory=list)
    split_policy: str = TRAIN_ONLY
    root_program: str | None = None
    program_harness: str | None = None

    def score_config(self, config: dict) -> float:
        raise NotImplementedError

    def holdout_score(self, config: dict) -> float:
        raise NotImplementedError(f"{self.task_id} has no holdout split")

    def root_for(self, generator) -> Candidate:
        """Starting candidate suited to ``generator``."""
        if generator.kind == MUTATOR or self.root_program is None:
            return self.root_candidate
        if generator.settings.get("payload_kind", PROGRAM_TEXT) == PARAMETER_CONFIG:
            return self.root_candidate
        return Candidate.program(self.root_program, provenance={"root": True})

    def manifest(self) -> dict:
        return {"task_id": self.task_id, "description": self.description,
                "split_policy": self.split_policy,
                "files": [f.to_dict() for f in self.input_manifest]}


def integral_score(response: float, answer: float) -> float:
    """``-log1p`` of the fractional error; higher is better, 0 is exact.

    >>> round(integral_score(2.0, 1.0), 6)
    -0.693147
    """
    response, answer = float(response), float(answer)
    if not math.isfinite(response):
        return -math.inf
    if not math.isfinite(answer):
        raise ValueError("reference answer must be finite")
    err = abs(response - answer)
    if abs(answer) >= NEAR_ZERO_ANSWER:
        err /= abs(answer)
    return -math.log1p(err)


def integral_task_score(scores: Sequence[float]) -> float:
    """Mean of per-integral scores; a single -inf sinks the whole task."""
    scores = [float(s) for s in scores]
    if not scores:
        raise ValueError("no scores to aggregate")
    if any(s == -math.inf or math.isnan(s) for s in scores):
        return -math.inf
    return math.fsum(scores) / len(scores)


def forecast_task_score(mase_values: Sequence[float]) -> float:
    """Negated geometric mean of per-dataset MASE."""
    v = np.asarray(list(mase_values), dtype=float)
    if v.size == 0:
        raise ValueError("no MASE values")
    if np.any(~(v > 0)):
        raise ValueError("MASE values must be positive")
    return -float(np.exp(np.mean(np.log(v))))
