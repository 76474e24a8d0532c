"""Candidate payloads and the advice context handed to generators."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

PROGRAM_TEXT = "program_text"
PARAMETER_CONFIG = "parameter_config"
PAYLOAD_KINDS = (PROGRAM_TEXT, PARAMETER_CONFIG)


def canonical_json(obj: Any) -> str:
    """Stable JSON text: sorted keys, no insignificant whitespace."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False,
                      allow_nan=False)


def payload_bytes(kind: str, payload: Any) -> bytes:
    if kind == PROGRAM_TEXT:
        return str(payload).encode("utf-8")
    return canonical_json(payload).encode("utf-8")


def payload_digest(kind: str, payload: Any) -> str:
    return hashlib.sha256(payload_bytes(kind, payload)).hexdigest()


@dataclass
class AdviceBundle:
    """Context assembled for a generator: task text, research ideas, lineage."""

    task_description: str
    research_ideas: list[str] = field(default_factory=list)
    recombination_summary: str | None = None
    score_history: list[tuple[float, str]] = field(default_factory=list)

    FIELDS = ("task_description", "research_ideas", "recombination_summary", "score_history")

    def to_dict(self) -> dict:
        return {
            "task_description": self.task_description,
            "research_ideas": list(self.research_ideas),
            "recombination_summary": self.recombination_summary,
            "score_history": [[_score_to_json(s), str(t)] for s, t in self.score_history],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AdviceBundle":
        unknown = set(data) - set(cls.FIELDS)
        if unknown:
            raise ValueError(f"unknown advice fields: {sorted(unknown)}")
        return cls(
            task_description=data["task_description"],
            research_ideas=list(data.get("research_ideas") or []),
            recombination_summary=data.get("recombination_summary"),
            score_history=[(_score_from_json(s), t) for s, t in data.get("score_history") or []],
        )

    def serialize(self) -> str:
        # Field order is fixed by FIELDS, not by insertion order.
        d = self.to_dict()
        return json.dumps({k: d[k] for k in self.FIELDS}, separators=(",", ":"),
                          ensure_ascii=False, allow_nan=False)

    @classmethod
    def deserialize(cls, text: str) -> "AdviceBundle":
        return cls.from_dict(json.loads(text))


def _score_to_json(score: float):
    score = float(score)
    if score != score or score in (float("inf"), float("-inf")):
        return repr(score)
    return score


def _score_from_json(value) -> float:
    return float(value)


@dataclass
class Candidate:
    """An executable payload plus where it came from.

    ``payload`` is program source text for ``program_text`` candidates and a
    flat JSON-compatible mapping for ``parameter_config`` candidates.
    """

    payload_kind: str
    payload: Any
    advice_context: AdviceBundle | None = None
    parent_digest: str | None = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.payload_kind not in PAYLOAD_KINDS:
            raise ValueError(f"unknown payload kind {self.payload_kind!r}")
        if not self.payload:
            raise ValueError("candidate payload must be nonempty")
        if self.payload_kind == PARAMETER_CONFIG and not isinstance(self.payload, dict):
            raise TypeError("parameter_config payload must be a mapping")

    @property
    def digest(self) -> str:
        return payload_digest(self.payload_kind, self.payload)

    @classmethod
    def program(cls, text: str, **kw) -> "Candidate":
        return cls(PROGRAM_TEXT, text, **kw)

    @classmethod
    def config(cls, mapping: dict, **kw) -> "Candidate":
        return cls(PARAMETER_CONFIG, dict(mapping), **kw)

    def to_dict(self) -> dict:
        return {
            "payload_kind": self.payload_kind,
            "payload": self.payload,
            "parent_digest": self.parent_digest,
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Candidate":
        return cls(data["payload_kind"], data["payload"],
                   parent_digest=data.get("parent_digest"),
                   provenance=dict(data.get("provenance") or {}))
