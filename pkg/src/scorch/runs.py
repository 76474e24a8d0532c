"""Run directories: manifest, stored state and the exports derived from it.

Layout under ``<output_root>/runs/<run_id>/``::

    manifest.json       run settings, timestamps, artifact list
    state.json          full tree (payloads and execution records)
    tree.json           tree export (schema-versioned)
    breakthroughs.csv   node_count,max_score,is_breakthrough
    breakthroughs.png   the same series as a figure
    timings.csv         per-node wall times (not part of the exports)
    nodes/<id>/         scratch directories of program candidates
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import math
import os
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import search

OUTPUT_ROOT_ENV = "SCORCH_OUTPUT_ROOT"
DEFAULT_OUTPUT_ROOT = "scorch-output"

_RUN_ID = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


class RunError(RuntimeError):
    pass


def output_root(explicit: str | None = None) -> Path:
    return Path(explicit or os.environ.get(OUTPUT_ROOT_ENV) or DEFAULT_OUTPUT_ROOT)


def default_run_id(task_id: str, generator: dict, budget: int, c_puct: float, seed: int) -> str:
    """Readable id that depends only on the run settings."""
    key = json.dumps([task_id, generator, budget, c_puct, seed], sort_keys=True)
    return f"{task_id}-s{seed}-{hashlib.sha256(key.encode()).hexdigest()[:8]}"


def run_dir(root: Path, run_id: str) -> Path:
    return Path(root) / "runs" / run_id


def claim_run_dir(root: Path, run_id: str, explicit: bool) -> tuple[str, Path]:
    """Create the run directory; derived ids get a numeric suffix on collision."""
    if not _RUN_ID.match(run_id):
        raise RunError(f"invalid run id {run_id!r}")
    candidate, n = run_id, 1
    while True:
        path = run_dir(root, candidate)
        try:
            path.mkdir(parents=True, exist_ok=False)
            return candidate, path
        except FileExistsError:
            if explicit:
                raise RunError(f"run {candidate!r} already exists under {root}") from None
            n += 1
            candidate = f"{run_id}-{n}"


def _now() -> str:
    return dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    run_id: str
    task_id: str
    generator: dict
    budget: int
    c_puct: float
    seed: int
    limits: dict
    workers: int = 1
    deterministic: bool = True
    status: str = "running"
    started_at: str = field(default_factory=_now)
    finished_at: str | None = None
    artifacts: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    def write(self, directory: Path):
        atomic_write(Path(directory) / "manifest.json",
                     json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")

    @classmethod
    def read(cls, directory: Path) -> "RunManifest":
        return cls(**json.loads((Path(directory) / "manifest.json").read_text()))


def atomic_write(path: Path, text: str):
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


# -- export formatting -------------------------------------------------------

def _fmt_score(score: float) -> str:
    if math.isnan(score):
        return "nan"
    if math.isinf(score):
        return "-inf" if score < 0 else "inf"
    return repr(float(score))


def tree_json(tree: search.SearchTree, run_id: str, task_id: str, deterministic: bool) -> str:
    doc = search.export_tree(tree, run_id, task_id, deterministic)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def breakthroughs_csv(tree: search.SearchTree) -> str:
    lines = ["node_count,max_score,is_breakthrough"]
    for count, best, rising in search.breakthrough_series(tree):
        lines.append(f"{count},{_fmt_score(best)},{'true' if rising else 'false'}")
    return "\n".join(lines) + "\n"


def timings_csv(tree: search.SearchTree) -> str:
    lines = ["node_id,status,wall_time_ms"]
    for n in tree:
        rec = n.eval_record
        lines.append(f"{n.id},{rec.status if rec else ''},{rec.wall_time_ms if rec else ''}")
    return "\n".join(lines) + "\n"


def state_json(tree: search.SearchTree) -> str:
    return json.dumps(search.tree_state(tree), indent=1, sort_keys=True) + "\n"


def load_tree(directory: Path) -> search.SearchTree:
    path = Path(directory) / "state.json"
    if not path.exists():
        raise RunError(f"no stored state in {directory}")
    return search.tree_from_state(json.loads(path.read_text()))


def write_exports(directory: Path, tree: search.SearchTree, manifest: RunManifest,
                  plot: bool = True) -> dict:
    directory = Path(directory)
    files = {
        "state": ("state.json", state_json(tree)),
        "tree": ("tree.json", tree_json(tree, manifest.run_id, manifest.task_id,
                                        manifest.deterministic)),
        "breakthroughs": ("breakthroughs.csv", breakthroughs_csv(tree)),
        "timings": ("timings.csv", timings_csv(tree)),
    }
    artifacts = {}
    for key, (name, text) in files.items():
        atomic_write(directory / name, text)
        artifacts[key] = name
    if plot:
        from .plotting import breakthrough_figure

        breakthrough_figure(search.breakthrough_series(tree), directory / "breakthroughs.png",
                            title=f"{manifest.task_id} / {manifest.run_id}")
        artifacts["breakthroughs_figure"] = "breakthroughs.png"
    return artifacts


def export_text(directory: Path, what: str) -> str:
    """Regenerate an export from stored state without touching the run."""
    manifest = RunManifest.read(directory)
    tree = load_tree(directory)
    if what == "tree":
        return tree_json(tree, manifest.run_id, manifest.task_id, manifest.deterministic)
    if what == "breakthroughs":
        return breakthroughs_csv(tree)
    raise ValueError(f"unknown export {what!r}")
