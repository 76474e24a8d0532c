"""The oscillatory-integrals benchmark.

Integrands ship as numpy expressions in ``x`` with fixed parameter values;
reference answers were computed offline at 40 significant digits (see
``scripts/build_integral_manifest.py``) and are stored as decimal strings.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

from .. import quadrature as quad
from ..candidates import Candidate
from .base import TRAIN_HOLDOUT, InputFile, ScorableTask, integral_score, integral_task_score

DATA = resources.files("scorch.tasks") / "data"
MANIFEST = "integrals.json"
TRAIN_MANIFEST = "integrals_train.json"

_NAMESPACE = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp, "log": np.log,
    "sqrt": np.sqrt, "sinh": np.sinh, "cosh": np.cosh, "tanh": np.tanh,
    "coth": lambda z: 1.0 / np.tanh(z), "abs": np.abs, "sign": np.sign, "pi": math.pi,
}


@dataclass(frozen=True)
class IntegralSpec:
    spec_id: str
    expression: str
    parameters: dict
    lower_limit: float
    reference: str
    split: str

    @property
    def reference_answer(self) -> float:
        return float(self.reference)

    @property
    def upper_limit(self) -> float:
        return math.inf

    @property
    def integrand(self) -> Callable:
        return make_integrand(self.expression, self.parameters)

    @classmethod
    def from_dict(cls, d: dict) -> "IntegralSpec":
        params = {k: float(v) for k, v in d["parameters"].items()}
        lower = float(eval(str(d.get("lower_limit", "0")), {"__builtins__": {}},  # noqa: S307
                           {**_NAMESPACE, **params}))
        return cls(d["spec_id"], d["integrand"], params, lower, str(d["reference_answer"]),
                   d["split"])


def make_integrand(expression: str, parameters: dict) -> Callable:
    """Compile ``expression`` into a vectorised function of ``x``."""
    code = compile(expression, f"<integrand {expression}>", "eval")
    scope = {**_NAMESPACE, **{k: float(v) for k, v in parameters.items()}}

    def f(x):
        with np.errstate(all="ignore"):
            return eval(code, {"__builtins__": {}}, {**scope, "x": np.asarray(x, dtype=float)})  # noqa: S307

    return f


def load_specs(path: str | Path | None = None, split: str | None = None) -> list[IntegralSpec]:
    specs = _load(str(path) if path else None)
    if split in (None, "all"):
        return list(specs)
    if split == "smoke":
        return list(SMOKE)
    if split not in ("train", "test"):
        raise ValueError(f"unknown split {split!r}")
    return [s for s in specs if s.split == split]


@lru_cache(maxsize=8)
def _load(path: str | None) -> tuple[IntegralSpec, ...]:
    text = Path(path).read_text() if path else (DATA / MANIFEST).read_text()
    doc = json.loads(text)
    return tuple(IntegralSpec.from_dict(d) for d in doc["integrals"])


def write_split(source: Path, split: str, target: Path):
    """Copy of a manifest restricted to one split."""
    doc = json.loads(Path(source).read_text())
    doc["integrals"] = [d for d in doc["integrals"] if d["split"] == split]
    doc["description"] = f"{doc.get('description', '')} ({split} split only)".strip()
    Path(target).write_text(json.dumps(doc, indent=2) + "\n")


# -- solving ----------------------------------------------------------------

ROOT_CONFIG = {"method": "baseline", "first_length": math.pi, "growth_ratio": 1.15,
               "max_segments": 60, "tol": 1e-6}

SCHEDULE = {
    "method": {"law": "categorical", "choices": ["baseline", "segmented_euler"]},
    "first_length": {"law": "multiplicative", "factors": [1.25, 2.0], "bounds": [0.05, 50.0]},
    "growth_ratio": {"law": "additive", "steps": [0.05, 0.01], "bounds": [1.0, 2.0]},
    "max_segments": {"law": "additive", "steps": [5, 20], "bounds": [8, 400], "integer": True},
    "tol": {"law": "multiplicative", "factors": [10.0], "bounds": [1e-10, 1e-3]},
}


def solve(spec: IntegralSpec, config: dict | None = None) -> quad.QuadResult:
    """Integrate ``spec`` the way ``config`` says."""
    cfg = {**ROOT_CONFIG, **(config or {})}
    f = spec.integrand
    if cfg["method"] == "baseline":
        return quad.baseline_quad(f, spec.lower_limit)
    if cfg["method"] != "segmented_euler":
        raise ValueError(f"unknown method {cfg['method']!r}")
    scheme = quad.SegmentScheme(float(cfg["first_length"]), float(cfg["growth_ratio"]),
                                int(cfg["max_segments"]))
    return quad.integrate_oscillatory(f, spec.lower_limit, scheme, float(cfg["tol"]))


def fractional_error(value: float, answer: float) -> float:
    if not math.isfinite(value):
        return math.inf
    return abs(value - answer) / abs(answer)


def score_specs(specs, config: dict | None = None) -> float:
    scores = []
    for spec in specs:
        try:
            value = solve(spec, config).value
        except Exception:  # noqa: BLE001 - a crashing integral scores -inf
            value = math.nan
        scores.append(integral_score(value, spec.reference_answer))
    return integral_task_score(scores)


_HARNESS = '''\
import math

import candidate
from scorch.tasks.base import integral_score, integral_task_score
from scorch.tasks.integrals import load_specs

scores = []
for spec in load_specs("inputs/{manifest}", "train"):
    try:
        value = float(candidate.integrate(spec.integrand, spec.lower_limit))
    except Exception:
        value = math.nan
    scores.append(integral_score(value, spec.reference_answer))
print("SCORE " + repr(integral_task_score(scores)))
'''

_ROOT_PROGRAM = '''\
from scorch.quadrature import baseline_quad


def integrate(f, a):
    return baseline_quad(f, a).value
'''


class IntegralsTask(ScorableTask):
    def __init__(self, manifest: str | Path | None = None):
        self.manifest_path = Path(manifest) if manifest else Path(str(DATA / MANIFEST))
        self.train = load_specs(self.manifest_path, "train")
        self._test = load_specs(self.manifest_path, "test")
        train_file = self.manifest_path.with_name(TRAIN_MANIFEST)
        inputs = [InputFile.of(train_file)] if train_file.exists() else []
        super().__init__(
            task_id="integrals",
            description=("Numerically evaluate oscillatory integrals over [a, inf). Each "
                         "integral scores -log(1 + |fractional error|); the task score is "
                         "their mean over the training split."),
            root_candidate=Candidate.config(ROOT_CONFIG),
            schedule=SCHEDULE,
            input_manifest=inputs,
            split_policy=TRAIN_HOLDOUT,
            root_program=_ROOT_PROGRAM,
            program_harness=_HARNESS.format(manifest=TRAIN_MANIFEST),
        )

    def score_config(self, config: dict) -> float:
        return score_specs(self.train, config)

    def holdout_score(self, config: dict) -> float:
        return score_specs(self._test, config)


def integrals_task(manifest: str | Path | None = None) -> IntegralsTask:
    return IntegralsTask(manifest)


# -- closed-form smoke set ---------------------------------------------------

def _smoke(spec_id, expression, answer, **params):
    return IntegralSpec(spec_id, expression, params, 0.0, repr(float(answer)), "smoke")


SMOKE = (
    _smoke("fresnel_sin", "sin(x**2)", math.sqrt(math.pi / 8)),
    _smoke("fresnel_cos", "cos(x**2)", math.sqrt(math.pi / 8)),
    _smoke("dirichlet", "sin(x)/x", math.pi / 2),
    _smoke("dirichlet_scaled", "sin(a*x)/x", math.pi / 2, a=3.0),
    _smoke("exp_decay", "exp(-x)", 1.0),
    _smoke("exp_cos", "exp(-a*x)*cos(b*x)", 0.5 / (0.25 + 4.0), a=0.5, b=2.0),
    _smoke("exp_sin", "exp(-a*x)*sin(b*x)", 2.0 / (0.25 + 4.0), a=0.5, b=2.0),
    _smoke("x_exp", "x*exp(-x)", 1.0),
    _smoke("lorentz", "1/(1 + x**2)", math.pi / 2),
    _smoke("cos_lorentz", "cos(x)/(1 + x**2)", math.pi / (2 * math.e)),
    _smoke("sinc_squared", "sin(x)**2/x**2", math.pi / 2),
    _smoke("damped_sinc", "exp(-x)*sin(x)/x", math.pi / 4),
    _smoke("sin_cubed", "sin(x)**3/x", math.pi / 4),
    _smoke("one_minus_cos", "(1 - cos(x))/x**2", math.pi / 2),
    _smoke("gaussian", "exp(-x**2)", math.sqrt(math.pi) / 2),
    _smoke("sin_sqrt", "sin(x)/sqrt(x)", math.sqrt(math.pi / 2)),
    _smoke("cos_sqrt", "cos(x)/sqrt(x)", math.sqrt(math.pi / 2)),
    _smoke("x_sin_lorentz", "x*sin(x)/(1 + x**2)", math.pi / (2 * math.e)),
    _smoke("sin_cube_arg", "sin(x**3)", math.gamma(1 / 3) / 6),
)
