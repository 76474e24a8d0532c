"""Score-driven tree search for empirical software, with built-in benchmarks."""

from .candidates import AdviceBundle, Candidate
from .generators import GenerationError, GeneratorHandle, build_advice, generate, mutate_config
from .quadrature import QuadResult, SegmentScheme, baseline_quad, integrate_oscillatory
from .sandbox import ExecutionRecord, Limits, SandboxError, execute
from .search import (SearchNode, SearchTree, best_solution, breakthrough_series,
                     compute_rank_scores, expand, export_tree, init_tree, run_search,
                     select_node)
from .tasks import ScorableTask, get_task

__version__ = "0.1.0"

__all__ = [
    "AdviceBundle", "Candidate", "ExecutionRecord", "GenerationError", "GeneratorHandle",
    "Limits", "QuadResult", "SandboxError", "ScorableTask", "SearchNode", "SearchTree",
    "SegmentScheme", "baseline_quad", "best_solution", "breakthrough_series", "build_advice",
    "compute_rank_scores", "execute", "expand", "export_tree", "generate", "get_task",
    "init_tree", "integrate_oscillatory", "mutate_config", "run_search", "select_node",
]
