"""Score-driven tree search over candidates.

Every node in the tree is eligible for expansion.  Selection maximises

    rank_score(u) + c * (1/|T|) * sqrt(N_total) / (1 + V(u))

where ``rank_score`` maps task scores onto [0, 1] by ascending rank and
``V(u)`` is one plus the number of descendants of ``u``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from . import sandbox
from .candidates import Candidate
from .generators import MAX_GENERATION_ATTEMPTS, GenerationError, GeneratorHandle, generate

SCHEMA_VERSION = 1
DEFAULT_C_PUCT = 1.0


@dataclass
class SearchNode:
    id: int
    parent_id: int | None
    candidate: Candidate
    task_score: float
    visit_count: int = 1
    creation_index: int = 0
    depth: int = 0
    eval_record: sandbox.ExecutionRecord | None = None


@dataclass
class RankTable:
    rank: dict[int, int]
    rank_score: dict[int, float]


class SearchTree:
    def __init__(self, c_puct: float = DEFAULT_C_PUCT, rng_seed: int = 0):
        if not c_puct > 0:
            raise ValueError("c_puct must be positive")
        self.c_puct = float(c_puct)
        self.rng_seed = int(rng_seed)
        self.nodes: dict[int, SearchNode] = {}
        self.children: dict[int, list[int]] = {}
        self.root_id: int | None = None
        self.n_total = 0

    def __len__(self):
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes.values())

    def node(self, node_id: int) -> SearchNode:
        return self.nodes[node_id]

    def ancestors(self, node_id: int):
        parent = self.nodes[node_id].parent_id
        while parent is not None:
            yield parent
            parent = self.nodes[parent].parent_id

    def _insert(self, parent_id, candidate, score, record) -> int:
        idx = len(self.nodes)
        depth = 0 if parent_id is None else self.nodes[parent_id].depth + 1
        self.nodes[idx] = SearchNode(idx, parent_id, candidate, _clean_score(score), 1, idx,
                                     depth, record)
        self.children[idx] = []
        self.n_total += 1
        return idx


def _clean_score(score) -> float:
    score = float(score)
    return -math.inf if math.isnan(score) else score


def init_tree(root_candidate: Candidate, root_score: float, c_puct: float = DEFAULT_C_PUCT,
              seed: int = 0, eval_record: sandbox.ExecutionRecord | None = None) -> SearchTree:
    tree = SearchTree(c_puct, seed)
    tree.root_id = tree._insert(None, root_candidate, root_score, eval_record)
    return tree


def compute_rank_scores(tree: SearchTree) -> RankTable:
    """Ascending ranks; equal scores are ordered by creation index."""
    order = sorted(tree.nodes.values(), key=lambda n: (n.task_score, n.creation_index))
    size = len(order)
    rank = {n.id: i + 1 for i, n in enumerate(order)}
    if size == 1:
        return RankTable(rank, {order[0].id: 1.0})
    return RankTable(rank, {nid: (r - 1) / (size - 1) for nid, r in rank.items()})


def puct_scores(tree: SearchTree, ranks: RankTable | None = None) -> dict[int, float]:
    ranks = ranks or compute_rank_scores(tree)
    bonus = tree.c_puct * math.sqrt(tree.n_total) / len(tree)
    return {n.id: ranks.rank_score[n.id] + bonus / (1 + n.visit_count) for n in tree}


def select_node(tree: SearchTree, ranks: RankTable | None = None) -> int:
    return select_nodes(tree, 1, ranks)[0]


def select_nodes(tree: SearchTree, k: int, ranks: RankTable | None = None) -> list[int]:
    """The ``k`` highest PUCT nodes, best first; ties favour older nodes."""
    scores = puct_scores(tree, ranks)
    ordered = sorted(tree.nodes.values(), key=lambda n: (-scores[n.id], n.creation_index))
    return [n.id for n in ordered[:k]]


def expand(tree: SearchTree, parent_id: int, child: Candidate, child_score: float,
           eval_record: sandbox.ExecutionRecord | None = None) -> int:
    if parent_id not in tree.nodes:
        raise KeyError(f"unknown parent id {parent_id!r}")
    idx = tree._insert(parent_id, child, child_score, eval_record)
    tree.children[parent_id].append(idx)
    for anc in tree.ancestors(idx):
        tree.nodes[anc].visit_count += 1
        tree.n_total += 1
    return idx


def best_solution(tree: SearchTree) -> int:
    best = None
    for n in tree.nodes.values():  # creation order
        if best is None or n.task_score > best.task_score:
            best = n
    return best.id


def breakthrough_series(tree: SearchTree) -> list[tuple[int, float, bool]]:
    """Running maximum by node count, with a flag on strict increases."""
    series = []
    running = None
    for count, n in enumerate(sorted(tree.nodes.values(), key=lambda n: n.creation_index), 1):
        rising = running is None or n.task_score > running
        if rising:
            running = n.task_score
        series.append((count, running, rising))
    return series


def _iteration_seed(seed: int, iteration: int, attempt: int = 0) -> tuple:
    return (int(seed), int(iteration), int(attempt))


@dataclass
class _Pending:
    parent_id: int
    child: Candidate | None
    failure: str | None = None


def run_search(task, generator: GeneratorHandle, budget: int, c_puct: float = DEFAULT_C_PUCT,
               seed: int = 0, limits: sandbox.Limits = sandbox.Limits(), workers: int = 1,
               advice=None, scratch_root=None,
               on_node: Callable[[SearchTree, int], None] | None = None) -> SearchTree:
    """Run ``budget`` select/generate/execute/expand iterations.

    With ``workers > 1`` the top ``workers`` nodes are expanded per round and
    their evaluations run concurrently; results are committed in selection
    order so the tree is still a function of the seed.

    Raises:
        sandbox.SandboxError: the executor could not run a candidate at all.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    if workers < 1:
        raise ValueError("workers must be at least 1")

    def scratch_for(node_index):
        if scratch_root is None:
            return None
        return f"{scratch_root}/nodes/{node_index}"

    root = task.root_for(generator)
    root_record = sandbox.execute(root, task, limits, scratch_for(0))
    tree = init_tree(root, root_record.score, c_puct, seed, root_record)
    if on_node:
        on_node(tree, tree.root_id)

    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        iteration = 0
        while iteration < budget:
            # an early tree may hold fewer distinct parents than workers
            batch = min(workers, budget - iteration, len(tree))
            parents = select_nodes(tree, batch)
            pending = [_generate_child(tree, generator, pid, advice, seed, iteration + j)
                       for j, pid in enumerate(parents)]
            first_index = len(tree)
            jobs = []
            for j, p in enumerate(pending):
                if p.child is None:
                    jobs.append(None)
                    continue
                args = (p.child, task, limits, scratch_for(first_index + j))
                jobs.append(pool.submit(sandbox.execute, *args) if pool else args)
            for p, job in zip(pending, jobs):
                if p.child is None:
                    record = sandbox.ExecutionRecord.failed(
                        sandbox.CRASHED, stderr_excerpt=p.failure or "",
                        notes={"generation_failed": True})
                    child = Candidate(tree.node(p.parent_id).candidate.payload_kind,
                                      tree.node(p.parent_id).candidate.payload,
                                      parent_digest=tree.node(p.parent_id).candidate.digest,
                                      provenance={"generation_failed": p.failure})
                else:
                    record = job.result() if pool else sandbox.execute(*job)
                    child = p.child
                idx = expand(tree, p.parent_id, child, record.score, record)
                if on_node:
                    on_node(tree, idx)
            iteration += batch
    finally:
        if pool:
            pool.shutdown()
    return tree


def _generate_child(tree, generator, parent_id, advice, seed, iteration) -> _Pending:
    parent = tree.node(parent_id).candidate
    context = advice(tree, parent_id) if callable(advice) else advice
    last_error = None
    for attempt in range(MAX_GENERATION_ATTEMPTS):
        try:
            child = generate(generator, parent, context, _iteration_seed(seed, iteration, attempt))
            return _Pending(parent_id, child)
        except GenerationError as exc:
            last_error = str(exc)
    return _Pending(parent_id, None, last_error)


def score_history(tree: SearchTree, node_id: int, summarize=None) -> list[tuple[float, str]]:
    """(score, summary) pairs from the root down to ``node_id``."""
    summarize = summarize or (lambda n: n.candidate.digest[:12])
    chain = [node_id, *tree.ancestors(node_id)][::-1]
    return [(tree.node(i).task_score, summarize(tree.node(i))) for i in chain]


# -- serialization -----------------------------------------------------------

def _score_json(score: float):
    return score if math.isfinite(score) else None


def export_tree(tree: SearchTree, run_id: str, task_id: str, deterministic: bool = True) -> dict:
    """Tree export document.  Wall times are dropped in deterministic mode."""
    nodes = []
    for n in sorted(tree.nodes.values(), key=lambda n: n.creation_index):
        wall = n.eval_record.wall_time_ms if n.eval_record is not None else None
        nodes.append({
            "id": n.id,
            "parent_id": n.parent_id,
            "creation_index": n.creation_index,
            "depth": n.depth,
            "task_score": _score_json(n.task_score),
            "visit_count": n.visit_count,
            "candidate_digest": n.candidate.digest,
            "status": n.eval_record.status if n.eval_record is not None else None,
            "wall_time_ms": None if deterministic else wall,
        })
    return {"schema_version": SCHEMA_VERSION, "run_id": run_id, "task_id": task_id,
            "c_puct": tree.c_puct, "seed": tree.rng_seed, "n_total": tree.n_total,
            "nodes": nodes}


def tree_state(tree: SearchTree) -> dict:
    """Everything needed to rebuild the tree, including payloads and records."""
    return {
        "schema_version": SCHEMA_VERSION,
        "c_puct": tree.c_puct,
        "seed": tree.rng_seed,
        "nodes": [{
            "id": n.id,
            "parent_id": n.parent_id,
            "task_score": _score_json(n.task_score),
            "candidate": n.candidate.to_dict(),
            "eval_record": n.eval_record.to_dict() if n.eval_record else None,
        } for n in sorted(tree.nodes.values(), key=lambda n: n.creation_index)],
    }


def tree_from_state(state: dict) -> SearchTree:
    """Replay the stored insertions; visit counts follow from the structure."""
    records = state["nodes"]
    if not records:
        raise ValueError("state has no nodes")

    def parts(r):
        score = -math.inf if r["task_score"] is None else float(r["task_score"])
        rec = sandbox.ExecutionRecord.from_dict(r["eval_record"]) if r["eval_record"] else None
        return Candidate.from_dict(r["candidate"]), score, rec

    cand, score, rec = parts(records[0])
    tree = init_tree(cand, score, state["c_puct"], state["seed"], rec)
    for r in records[1:]:
        cand, score, rec = parts(r)
        idx = expand(tree, r["parent_id"], cand, score, rec)
        if idx != r["id"]:
            raise ValueError("node ids in state are not in creation order")
    return tree


TREE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema_version", "run_id", "task_id", "c_puct", "seed", "nodes"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "run_id": {"type": "string", "minLength": 1},
        "task_id": {"type": "string", "minLength": 1},
        "c_puct": {"type": "number", "exclusiveMinimum": 0},
        "seed": {"type": "integer"},
        "n_total": {"type": "integer", "minimum": 1},
        "nodes": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["id", "parent_id", "creation_index", "task_score",
                             "visit_count", "candidate_digest", "wall_time_ms"],
                "properties": {
                    "id": {"type": "integer", "minimum": 0},
                    "parent_id": {"type": ["integer", "null"]},
                    "creation_index": {"type": "integer", "minimum": 0},
                    "depth": {"type": "integer", "minimum": 0},
                    "task_score": {"type": ["number", "null"]},
                    "visit_count": {"type": "integer", "minimum": 1},
                    "candidate_digest": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
                    "status": {"type": ["string", "null"]},
                    "wall_time_ms": {"type": ["integer", "null"], "minimum": 0},
                },
            },
        },
    },
}

