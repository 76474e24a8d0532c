"""Run one candidate against a task and turn the outcome into a score.

Parameter configurations are scored in-process by the task's scorer.
Program candidates run as a separate Python process in a scratch directory
holding read-only copies of the task inputs; the last non-empty line of
stdout must be ``SCORE <decimal>``.
"""

from __future__ import annotations

import math
import os
import shutil
import signal
import stat
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

from .candidates import PARAMETER_CONFIG, PROGRAM_TEXT, Candidate

OK = "ok"
TIMEOUT = "timeout"
CRASHED = "crashed"
BAD_OUTPUT = "bad_output"
STATUSES = (OK, TIMEOUT, CRASHED, BAD_OUTPUT)

SCORE_PREFIX = "SCORE"


class SandboxError(RuntimeError):
    """Infrastructure failure: the sandbox could not be set up or spawned."""


@dataclass(frozen=True)
class Limits:
    wall_time_s: float = 300.0
    output_bytes: int = 256 * 1024
    memory_mb: int | None = None

    def __post_init__(self):
        if not self.wall_time_s > 0 or not self.output_bytes > 0:
            raise ValueError("limits must be positive")
        if self.memory_mb is not None and self.memory_mb <= 0:
            raise ValueError("memory_mb must be positive")


@dataclass
class ExecutionRecord:
    status: str
    score: float
    wall_time_ms: int
    stdout_excerpt: str = ""
    stderr_excerpt: str = ""
    artifacts_dir: str | None = None
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if (self.status == OK) != math.isfinite(self.score):
            raise ValueError("status 'ok' requires a finite score and vice versa")

    @classmethod
    def failed(cls, status: str, wall_time_ms: int = 0, **kw) -> "ExecutionRecord":
        return cls(status, -math.inf, wall_time_ms, **kw)

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "score": self.score if math.isfinite(self.score) else None,
            "wall_time_ms": self.wall_time_ms,
            "stdout_excerpt": self.stdout_excerpt,
            "stderr_excerpt": self.stderr_excerpt,
            "artifacts_dir": self.artifacts_dir,
            "notes": self.notes,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExecutionRecord":
        score = d.get("score")
        return cls(d["status"], -math.inf if score is None else float(score),
                   int(d.get("wall_time_ms") or 0), d.get("stdout_excerpt", ""),
                   d.get("stderr_excerpt", ""), d.get("artifacts_dir"), dict(d.get("notes") or {}))


def truncate(data: bytes | str, cap: int) -> str:
    """Keep the tail of ``data`` within ``cap`` bytes (the score line lives there)."""
    if isinstance(data, str):
        data = data.encode("utf-8", "replace")
    if len(data) > cap:
        data = data[-cap:]
    return data.decode("utf-8", "replace")


def parse_score(stdout: str) -> float | None:
    """Score from the final non-empty stdout line, or None if malformed."""
    lines = [ln.strip() for ln in stdout.splitlines() if ln.strip()]
    if not lines:
        return None
    parts = lines[-1].split()
    if len(parts) != 2 or parts[0] != SCORE_PREFIX:
        return None
    try:
        return float(parts[1])
    except ValueError:
        return None


def format_score_line(score: float) -> str:
    """The protocol line for ``score``; ``repr`` keeps floats exact."""
    return f"{SCORE_PREFIX} {float(score)!r}"


def execute(candidate: Candidate, task, limits: Limits = Limits(),
            scratch_dir: str | os.PathLike | None = None) -> ExecutionRecord:
    """Evaluate ``candidate`` on ``task`` under ``limits``.

    Raises:
        SandboxError: scratch directory or child process could not be created.
    """
    if candidate.payload_kind == PARAMETER_CONFIG:
        return _score_config(candidate, task)
    if candidate.payload_kind == PROGRAM_TEXT:
        return _run_program(candidate, task, limits, scratch_dir)
    raise ValueError(f"unsupported payload kind {candidate.payload_kind!r}")


def _score_config(candidate: Candidate, task) -> ExecutionRecord:
    started = time.perf_counter()
    try:
        score = float(task.score_config(candidate.payload))
    except Exception as exc:  # noqa: BLE001 - candidate failures become data
        elapsed = int((time.perf_counter() - started) * 1000)
        return ExecutionRecord.failed(CRASHED, elapsed,
                                      stderr_excerpt=f"{type(exc).__name__}: {exc}")
    elapsed = int((time.perf_counter() - started) * 1000)
    if not math.isfinite(score):
        return ExecutionRecord.failed(BAD_OUTPUT, elapsed, stderr_excerpt=f"non-finite score {score!r}")
    return ExecutionRecord(OK, score, elapsed)


def _preexec(limits: Limits):
    def apply():
        os.setsid()
        if limits.memory_mb:
            try:
                import resource
                cap = limits.memory_mb * 1024 * 1024
                resource.setrlimit(resource.RLIMIT_AS, (cap, cap))
            except (ImportError, ValueError, OSError):
                pass
    return apply


def _stage_inputs(task, inputs_dir: Path):
    inputs_dir.mkdir(parents=True, exist_ok=True)
    for item in getattr(task, "input_manifest", []):
        dst = inputs_dir / item.name
        shutil.copyfile(item.path, dst)
        os.chmod(dst, stat.S_IRUSR | stat.S_IRGRP | stat.S_IROTH)
    os.chmod(inputs_dir, stat.S_IRUSR | stat.S_IXUSR | stat.S_IRGRP | stat.S_IXGRP)


def _child_env() -> dict:
    keep = ("PATH", "HOME", "LANG", "LC_ALL", "SYSTEMROOT", "TMPDIR")
    env = {k: os.environ[k] for k in keep if k in os.environ}
    # the harness imports this package; make it importable without installation
    pkg_root = str(Path(__file__).resolve().parents[1])
    env["PYTHONPATH"] = os.pathsep.join(filter(None, [pkg_root, os.environ.get("PYTHONPATH")]))
    env["PYTHONHASHSEED"] = "0"
    return env


def _run_program(candidate: Candidate, task, limits: Limits, scratch_dir) -> ExecutionRecord:
    owns_scratch = scratch_dir is None
    try:
        scratch = Path(tempfile.mkdtemp(prefix="scorch-") if owns_scratch else scratch_dir)
        scratch.mkdir(parents=True, exist_ok=True)
        (scratch / "candidate.py").write_text(candidate.payload)
        _stage_inputs(task, scratch / "inputs")
        entry = "candidate.py"
        harness = getattr(task, "program_harness", None)
        if harness:
            (scratch / "harness.py").write_text(harness)
            entry = "harness.py"
    except OSError as exc:
        raise SandboxError(f"cannot prepare scratch directory: {exc}") from exc

    started = time.perf_counter()
    try:
        proc = subprocess.Popen([sys.executable, "-I", entry] if not harness else
                                [sys.executable, entry],
                                cwd=scratch, stdout=subprocess.PIPE, stderr=subprocess.PIPE,
                                stdin=subprocess.DEVNULL, env=_child_env(),
                                preexec_fn=_preexec(limits))
    except OSError as exc:
        raise SandboxError(f"cannot spawn candidate process: {exc}") from exc

    timed_out = False
    try:
        out, err = proc.communicate(timeout=limits.wall_time_s)
    except subprocess.TimeoutExpired:
        timed_out = True
        try:
            os.killpg(proc.pid, signal.SIGKILL)
        except ProcessLookupError:
            pass
        out, err = proc.communicate()
    elapsed = int((time.perf_counter() - started) * 1000)

    stdout = truncate(out, limits.output_bytes)
    stderr = truncate(err, limits.output_bytes)
    common = dict(stdout_excerpt=stdout, stderr_excerpt=stderr,
                  artifacts_dir=None if owns_scratch else str(scratch),
                  notes={"returncode": proc.returncode,
                         "memory_mb": limits.memory_mb})
    if owns_scratch:
        _remove_tree(scratch)

    if timed_out:
        return ExecutionRecord.failed(TIMEOUT, elapsed, **common)
    if proc.returncode != 0:
        return ExecutionRecord.failed(CRASHED, elapsed, **common)
    score = parse_score(out.decode("utf-8", "replace"))
    if score is None or not math.isfinite(score):
        return ExecutionRecord.failed(BAD_OUTPUT, elapsed, **common)
    return ExecutionRecord(OK, score, elapsed, **common)


def _remove_tree(path: Path):
    def writable(func, p, _exc):
        os.chmod(os.path.dirname(p), stat.S_IRWXU)
        os.chmod(p, stat.S_IRWXU)
        func(p)

    shutil.rmtree(path, onerror=writable)
