"""Quadratic bowl with a published target; the search-loop test bed."""

from __future__ import annotations

import math

from ..candidates import Candidate
from .base import TRAIN_ONLY, ScorableTask

TARGET = (1.25, -0.5, 2.0, 0.75, -1.5, 0.25, 1.0, -2.0)
STEPS = [1.0, 0.5, 0.25, 0.1, 0.05, 0.01]
BOUNDS = [-5.0, 5.0]

_HARNESS = '''\
import math
import candidate

TARGET = {target!r}

x = [float(v) for v in candidate.solve()]
if len(x) != len(TARGET) or not all(math.isfinite(v) for v in x):
    raise SystemExit("solve() must return {dim} finite numbers")
print("SCORE " + repr(-math.fsum((a - b) ** 2 for a, b in zip(x, TARGET))))
'''

_ROOT_PROGRAM = '''\
def solve():
    return [0.0] * {dim}
'''


def target(dimension: int) -> list[float]:
    return [TARGET[i % len(TARGET)] for i in range(dimension)]


def key(i: int) -> str:
    return f"x{i}"


class SyntheticTask(ScorableTask):
    def __init__(self, dimension: int = 4):
        if dimension < 1:
            raise ValueError("dimension must be at least 1")
        self.dimension = dimension
        self.target = target(dimension)
        schedule = {key(i): {"law": "additive", "steps": STEPS, "bounds": BOUNDS}
                    for i in range(dimension)}
        super().__init__(
            task_id="synthetic",
            description=(f"Find x in R^{dimension} maximising -sum((x_i - a_i)^2) for the "
                         f"fixed target a = {self.target}."),
            root_candidate=Candidate.config({key(i): 0.0 for i in range(dimension)}),
            schedule=schedule,
            split_policy=TRAIN_ONLY,
            root_program=_ROOT_PROGRAM.format(dim=dimension),
            program_harness=_HARNESS.format(target=self.target, dim=dimension),
        )

    def vector(self, config: dict) -> list[float]:
        extra = set(config) - {key(i) for i in range(self.dimension)}
        if extra:
            raise KeyError(f"unexpected keys {sorted(extra)}")
        return [float(config[key(i)]) for i in range(self.dimension)]

    def score_config(self, config: dict) -> float:
        x = self.vector(config)
        return -math.fsum((xi - ai) ** 2 for xi, ai in zip(x, self.target))


def synthetic_task(dimension: int = 4) -> SyntheticTask:
    return SyntheticTask(dimension)
