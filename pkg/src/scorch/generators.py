"""Child-candidate generators.

Two kinds are supported:

* ``deterministic_mutator`` perturbs one key of a parameter configuration
  per call, driven by a per-key schedule and a seed.  It stands in for a
  language model so the search loop can be tested end to end.
* ``external_process`` forwards a request to another program, either a
  long-lived child speaking line-delimited JSON on stdin/stdout or an HTTP
  endpoint accepting a JSON POST.

Schedules map each config key to a perturbation law::

    {"ratio":  {"law": "additive", "steps": [0.05], "bounds": [1.0, 2.0]},
     "scale":  {"law": "multiplicative", "factors": [1.1, 2.0], "bounds": [0.1, 10]},
     "window": {"law": "additive", "steps": [1, 2], "bounds": [1, 60], "integer": true},
     "method": {"law": "categorical", "choices": ["average", "median"]},
     "name":   {"law": "fixed"}}
"""

from __future__ import annotations

import json
import logging
import os
import queue
import shlex
import subprocess
import threading
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .candidates import (PARAMETER_CONFIG, PROGRAM_TEXT, AdviceBundle, Candidate,
                         payload_digest)

log = logging.getLogger(__name__)

PROTOCOL_VERSION = 1
DEFAULT_TIMEOUT_S = 120.0
MAX_GENERATION_ATTEMPTS = 3

MUTATOR = "deterministic_mutator"
EXTERNAL = "external_process"

HYBRID_INSTRUCTION = (
    "Two earlier solutions are compared below. Write a single new solution that "
    "keeps the strongest elements of each and merges them into one hybrid "
    "approach expected to outscore both."
)
IDEA_INSTRUCTION = "Carry out the following research ideas when rewriting the solution:"


class GenerationError(RuntimeError):
    """The generator itself failed (unreachable, timed out, protocol error).

    Distinct from a candidate that generates fine but then fails to run.
    """


class ScheduleError(KeyError):
    pass


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, (list, tuple)):
        return np.random.default_rng(np.random.SeedSequence([int(s) for s in seed]))
    return np.random.default_rng(int(seed))


def _clamp(value, bounds):
    if bounds is None:
        return value
    lo, hi = bounds
    return min(max(value, lo), hi)


def mutable_keys(config: dict, schedule: dict) -> list[str]:
    missing = sorted(k for k in config if k not in schedule)
    if missing:
        raise ScheduleError(f"no schedule entry for config keys {missing}")
    return sorted(k for k in config if schedule[k].get("law", "fixed") != "fixed")


def mutate_config(parent_config: dict, schedule: dict, seed) -> dict:
    """Perturb exactly one mutable key of ``parent_config``.

    The key, step and direction are all drawn from ``seed``; numeric results
    are clamped to the key's bounds and rounded to 12 decimals so repeated
    additive steps land on the same float on every platform.  A config with
    no mutable keys is returned unchanged.
    """
    keys = mutable_keys(parent_config, schedule)
    child = dict(parent_config)
    if not keys:
        return child
    rng = _rng(seed)
    key = keys[int(rng.integers(len(keys)))]
    rule = schedule[key]
    law = rule["law"]
    value = parent_config[key]
    if law == "additive":
        steps = rule["steps"]
        step = steps[int(rng.integers(len(steps)))]
        direction = 1 if rng.random() < 0.5 else -1
        new = _clamp(value + direction * step, rule.get("bounds"))
    elif law == "multiplicative":
        factors = rule["factors"]
        factor = factors[int(rng.integers(len(factors)))]
        new = value * factor if rng.random() < 0.5 else value / factor
        new = _clamp(new, rule.get("bounds"))
    elif law == "categorical":
        others = [c for c in rule["choices"] if c != value]
        if not others:
            return child
        new = others[int(rng.integers(len(others)))]
    else:
        raise ScheduleError(f"unknown law {law!r} for key {key!r}")
    if law in ("additive", "multiplicative"):
        new = int(round(new)) if rule.get("integer") else round(float(new), 12)
    child[key] = new
    return child


@dataclass
class GeneratorHandle:
    """Which generator to use and how to reach it.

    ``settings`` for the mutator: ``{"schedule": {...}}``.  For an external
    generator: ``{"command": "python gen.py"}`` or ``{"url": "http://..."}``
    plus optional ``timeout_s``.
    """

    kind: str
    settings: dict = field(default_factory=dict)
    _client: Any = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in (MUTATOR, EXTERNAL):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.kind == EXTERNAL and bool(self.settings.get("command")) == bool(self.settings.get("url")):
            raise ValueError("external generator needs exactly one of 'command' or 'url'")

    @classmethod
    def mutator(cls, schedule: dict) -> "GeneratorHandle":
        return cls(MUTATOR, {"schedule": schedule})

    @classmethod
    def external(cls, command: str | None = None, url: str | None = None,
                 timeout_s: float = DEFAULT_TIMEOUT_S,
                 payload_kind: str = PROGRAM_TEXT) -> "GeneratorHandle":
        settings = {"timeout_s": timeout_s, "payload_kind": payload_kind}
        if command:
            settings["command"] = command
        if url:
            settings["url"] = url
        return cls(EXTERNAL, settings)

    def describe(self) -> dict:
        return {"kind": self.kind,
                **{k: v for k, v in self.settings.items() if k != "schedule"}}

    def connect(self):
        """Start an external generator now so an unreachable one fails early.

        Raises:
            GenerationError: the generator process could not be launched.
        """
        if self.kind == EXTERNAL and self._client is None:
            self._client = _make_client(self.settings)
            if isinstance(self._client, ProcessClient):
                self._client._start()

    def close(self):
        if self._client is not None:
            self._client.close()
            self._client = None


def build_advice(task, ideas=(), recombination: tuple[str, str] | None = None,
                 score_history=()) -> AdviceBundle:
    """Assemble the generator context for ``task``.

    ``ideas`` are passed through verbatim.  ``recombination`` is a pair of
    parent-solution summaries; when given, the bundle carries both plus an
    instruction to hybridize them.
    """
    summary = None
    if recombination is not None:
        first, second = recombination
        summary = "\n\n".join([HYBRID_INSTRUCTION, "Solution A:\n" + first.strip(),
                               "Solution B:\n" + second.strip()])
    description = task if isinstance(task, str) else task.description
    return AdviceBundle(task_description=description, research_ideas=list(ideas),
                        recombination_summary=summary, score_history=list(score_history))


def render_prompt(bundle: AdviceBundle, parent_payload: str) -> str:
    """Flatten an advice bundle and parent payload into one prompt text."""
    parts = ["# Task", bundle.task_description.strip()]
    if bundle.research_ideas:
        parts += ["# Research ideas", IDEA_INSTRUCTION]
        parts += [f"{i}. {idea.strip()}" for i, idea in enumerate(bundle.research_ideas, 1)]
    if bundle.recombination_summary:
        parts += ["# Recombination", bundle.recombination_summary.strip()]
    if bundle.score_history:
        parts.append("# Earlier attempts (score, note)")
        parts += [f"- {score!r}: {note}" for score, note in bundle.score_history]
    parts += ["# Current solution", parent_payload]
    return "\n\n".join(parts) + "\n"


def generate(handle: GeneratorHandle, parent: Candidate, context: AdviceBundle | None,
             seed) -> Candidate:
    """Produce a child of ``parent``.

    Raises:
        GenerationError: the external generator could not produce a child.
    """
    if handle.kind == MUTATOR:
        if parent.payload_kind != PARAMETER_CONFIG:
            raise ValueError("the deterministic mutator only handles parameter_config candidates")
        schedule = handle.settings["schedule"]
        child_cfg = mutate_config(parent.payload, schedule, seed)
        exhausted = not mutable_keys(parent.payload, schedule)
        changed = sorted(k for k in child_cfg if child_cfg[k] != parent.payload[k])
        return Candidate(PARAMETER_CONFIG, child_cfg, advice_context=context,
                         parent_digest=parent.digest,
                         provenance={"generator": MUTATOR, "changed": changed,
                                     "exhausted": exhausted})

    if handle._client is None:
        handle._client = _make_client(handle.settings)
    request = {
        "protocol_version": PROTOCOL_VERSION,
        "payload_kind": parent.payload_kind,
        "parent_payload": parent.payload,
        "advice": context.to_dict() if context else None,
        "prompt": render_prompt(context, _payload_text(parent)) if context else None,
        "seed": _seed_to_int(seed),
    }
    response = handle._client.request(request)
    if "error" in response:
        raise GenerationError(f"generator reported: {response['error']}")
    if "child_payload" not in response:
        raise GenerationError("response has neither 'child_payload' nor 'error'")
    child_payload = response["child_payload"]
    kind = response.get("payload_kind", parent.payload_kind)
    digest = payload_digest(kind, child_payload)
    claimed = response.get("child_digest")
    if claimed is not None and claimed != digest:
        raise GenerationError("child payload does not match its declared digest")
    try:
        return Candidate(kind, child_payload, advice_context=context, parent_digest=parent.digest,
                         provenance={"generator": EXTERNAL, "response_digest": digest})
    except (TypeError, ValueError) as exc:
        raise GenerationError(f"invalid child payload: {exc}") from exc


def _payload_text(candidate: Candidate) -> str:
    if candidate.payload_kind == PROGRAM_TEXT:
        return candidate.payload
    return json.dumps(candidate.payload, sort_keys=True, indent=2)


def _seed_to_int(seed) -> int:
    if isinstance(seed, (list, tuple)):
        return int(np.random.SeedSequence([int(s) for s in seed]).generate_state(1)[0])
    return int(seed)


def _make_client(settings: dict):
    timeout = float(settings.get("timeout_s", DEFAULT_TIMEOUT_S))
    if settings.get("url"):
        return HttpClient(settings["url"], timeout)
    return ProcessClient(settings["command"], timeout)


class ProcessClient:
    """Long-lived child process speaking one JSON object per line."""

    def __init__(self, command: str | list[str], timeout_s: float):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout_s = timeout_s
        self._proc: subprocess.Popen | None = None
        self._lines: queue.Queue = queue.Queue()
        self._lock = threading.Lock()

    def _start(self):
        try:
            self._proc = subprocess.Popen(
                self.command, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL, text=True, bufsize=1, env=os.environ.copy())
        except OSError as exc:
            raise GenerationError(f"cannot start generator {self.command!r}: {exc}") from exc
        self._lines = queue.Queue()
        threading.Thread(target=self._pump, args=(self._proc, self._lines), daemon=True).start()

    @staticmethod
    def _pump(proc, lines):
        for line in proc.stdout:
            lines.put(line)
        lines.put(None)

    def request(self, message: dict) -> dict:
        with self._lock:
            if self._proc is None or self._proc.poll() is not None:
                self._start()
            try:
                self._proc.stdin.write(json.dumps(message) + "\n")
                self._proc.stdin.flush()
            except (BrokenPipeError, OSError) as exc:
                self.close()
                raise GenerationError(f"generator pipe closed: {exc}") from exc
            try:
                line = self._lines.get(timeout=self.timeout_s)
            except queue.Empty:
                self.close()
                raise GenerationError(f"generator timed out after {self.timeout_s}s") from None
            if line is None:
                self.close()
                raise GenerationError("generator exited without replying")
            try:
                return json.loads(line)
            except json.JSONDecodeError as exc:
                raise GenerationError(f"malformed generator reply: {exc}") from exc

    def close(self):
        if self._proc is not None:
            if self._proc.poll() is None:
                self._proc.kill()
            self._proc.wait()
            for stream in (self._proc.stdin, self._proc.stdout):
                try:
                    stream.close()
                except OSError:
                    pass
            self._proc = None


class HttpClient:
    def __init__(self, url: str, timeout_s: float):
        self.url = url
        self.timeout_s = timeout_s

    def request(self, message: dict) -> dict:
        req = urllib.request.Request(self.url, data=json.dumps(message).encode(),
                                     headers={"Content-Type": "application/json"})
        try:
            with urllib.request.urlopen(req, timeout=self.timeout_s) as resp:
                return json.loads(resp.read().decode())
        except (urllib.error.URLError, TimeoutError, OSError) as exc:
            raise GenerationError(f"generator endpoint {self.url} failed: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise GenerationError(f"malformed generator reply: {exc}") from exc

    def close(self):
        pass
