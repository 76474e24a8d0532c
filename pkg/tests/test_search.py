import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scorch import search
from scorch.candidates import Candidate
from scorch.generators import GeneratorHandle
from scorch.search import (best_solution, breakthrough_series, compute_rank_scores, expand,
                           init_tree, run_search, select_node)
from scorch.tasks import synthetic_task
from treegen import random_tree


def cfg(i):
    return Candidate.config({"i": i})


def chain(scores, c=1.0):
    tree = init_tree(cfg(0), scores[0], c)
    for i, s in enumerate(scores[1:], 1):
        expand(tree, i - 1, cfg(i), s)
    return tree


def star(scores, c=1.0):
    tree = init_tree(cfg(0), scores[0], c)
    for i, s in enumerate(scores[1:], 1):
        expand(tree, 0, cfg(i), s)
    return tree


# -- oracles -----------------------------------------------------------------

def descendants(tree, u):
    out, stack = 0, list(tree.children[u])
    while stack:
        v = stack.pop()
        out += 1
        stack.extend(tree.children[v])
    return out


def brute_ranks(tree):
    nodes = sorted(tree.nodes.values(), key=lambda n: n.creation_index)
    # stable sort by score keeps creation order among equals
    order = sorted(nodes, key=lambda n: n.task_score)
    n = len(order)
    return {node.id: (1.0 if n == 1 else i / (n - 1)) for i, node in enumerate(order)}


def brute_select(tree):
    ranks = brute_ranks(tree)
    n_total = sum(1 + descendants(tree, u) for u in tree.nodes)
    best, best_val = None, -math.inf
    for node in sorted(tree.nodes.values(), key=lambda n: n.creation_index):
        v = 1 + descendants(tree, node.id)
        val = ranks[node.id] + tree.c_puct * (1 / len(tree)) * math.sqrt(n_total) / (1 + v)
        if val > best_val:
            best, best_val = node.id, val
    return best


# -- init / ranks --------------------------------------------------------------

def test_init_tree_single_node():
    tree = init_tree(cfg(0), 0.5, 1.0)
    assert len(tree) == 1
    assert tree.node(tree.root_id).visit_count == 1
    assert tree.n_total == 1
    assert compute_rank_scores(tree).rank_score[tree.root_id] == 1.0


def test_init_rejects_nonpositive_c():
    with pytest.raises(ValueError):
        init_tree(cfg(0), 0.0, 0.0)


def test_rank_scores_three_distinct():
    tree = star([-1.0, 0.0, 2.0])
    assert [compute_rank_scores(tree).rank_score[i] for i in range(3)] == [0.0, 0.5, 1.0]


def test_rank_scores_all_equal_follow_creation_order():
    tree = star([3.0] * 4)
    rs = compute_rank_scores(tree).rank_score
    assert [rs[i] for i in range(4)] == pytest.approx([0, 1 / 3, 2 / 3, 1])
    assert rs == brute_ranks(tree)


def test_failed_nodes_take_lowest_ranks():
    tree = star([-math.inf, 5.0, -math.inf, -1e300])
    rank = compute_rank_scores(tree).rank
    assert rank[0] == 1 and rank[2] == 2 and rank[3] == 3 and rank[1] == 4


def test_nan_score_stored_as_failure():
    tree = init_tree(cfg(0), math.nan)
    assert tree.node(0).task_score == -math.inf


# -- selection -----------------------------------------------------------------

def test_single_node_selects_root():
    assert select_node(init_tree(cfg(0), 1.0)) == 0


def test_two_node_hand_example():
    tree = star([0.0, 1.0])
    scores = search.puct_scores(tree)
    assert scores[0] == pytest.approx(0.5 * math.sqrt(3) / 3)
    assert scores[1] == pytest.approx(1 + 0.5 * math.sqrt(3) / 2)
    assert select_node(tree) == 1 == brute_select(tree)


def test_tiny_c_exploits_best_score():
    rng = random.Random(3)
    for _ in range(50):
        tree = random_tree(rng, rng.randint(2, 40), c_puct=1e-12)
        assert select_node(tree) == best_solution(tree)


def test_selection_tie_goes_to_older_node():
    tree = star([0.0, 0.0, 0.0])
    # leaves 1 and 2 share V=1; equal rank scores make their PUCT values identical
    ranks = search.RankTable({0: 1, 1: 2, 2: 3}, {0: 0.0, 1: 0.5, 2: 0.5})
    scores = search.puct_scores(tree, ranks)
    assert scores[1] == scores[2] > scores[0]
    assert select_node(tree, ranks) == 1


def test_select_nodes_ordering():
    tree = random_tree(random.Random(9), 30)
    top = search.select_nodes(tree, 5)
    scores = search.puct_scores(tree)
    assert top[0] == select_node(tree)
    assert [scores[i] for i in top] == sorted((scores[i] for i in top), reverse=True)


# -- expansion -----------------------------------------------------------------

def test_expand_root_of_fresh_tree():
    tree = init_tree(cfg(0), 0.0)
    child = expand(tree, 0, cfg(1), 1.0)
    assert tree.node(0).visit_count == 2
    assert tree.node(child).visit_count == 1
    assert tree.n_total == 3


def test_chain_insert_increments_all_ancestors():
    tree = chain([0.0] * 6)
    before = {u: tree.node(u).visit_count for u in tree.nodes}
    total = tree.n_total
    new = expand(tree, 5, cfg(99), 0.0)
    assert all(tree.node(u).visit_count == before[u] + 1 for u in before)
    assert tree.n_total == total + tree.node(new).depth + 1


def test_expand_unknown_parent():
    with pytest.raises(KeyError):
        expand(init_tree(cfg(0), 0.0), 7, cfg(1), 0.0)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 10**6), st.floats(-1e6, 1e6)), max_size=60))
def test_visit_counts_match_structure(ops):
    tree = init_tree(cfg(0), 0.0)
    for pick, score in ops:
        expand(tree, pick % len(tree), cfg(len(tree)), score)
    for u in tree.nodes:
        assert tree.node(u).visit_count == 1 + descendants(tree, u)
    assert tree.n_total == sum(n.visit_count for n in tree)
    roots = [n for n in tree if n.parent_id is None]
    assert len(roots) == 1
    for n in tree:
        assert n.depth == len(list(tree.ancestors(n.id)))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(allow_nan=False) | st.just(-math.inf), min_size=1, max_size=40))
def test_rank_scores_match_stable_sort(scores):
    tree = star(scores)
    table = compute_rank_scores(tree)
    assert table.rank_score == brute_ranks(tree)
    assert sorted(table.rank.values()) == list(range(1, len(tree) + 1))
    values = list(table.rank_score.values())
    assert all(0 <= v <= 1 for v in values)
    if len(tree) > 1:
        assert min(values) == 0 and max(values) == 1
        best = max(tree, key=lambda n: (n.task_score, -n.creation_index))
        assert table.rank_score[best.id] == 1 or any(
            m.task_score == best.task_score and m.creation_index > best.creation_index
            for m in tree)
    for a in tree:
        for b in tree:
            if a.task_score > b.task_score:
                assert table.rank_score[a.id] > table.rank_score[b.id]


def test_selection_matches_brute_force():
    rng = random.Random(11)
    for _ in range(300):
        tree = random_tree(rng, rng.randint(1, 60), c_puct=rng.choice([0.1, 1.0, 5.0]),
                           tie_heavy=rng.random() < 0.3)
        assert select_node(tree) == brute_select(tree)


# -- best / breakthroughs --------------------------------------------------------

def test_best_solution_examples():
    assert best_solution(init_tree(cfg(0), 1.0)) == 0
    assert best_solution(star([0.1, 0.9, 0.9])) == 1
    assert best_solution(star([-math.inf, -5.0, -math.inf])) == 1


def test_breakthrough_example():
    series = breakthrough_series(star([1.0, 0.0, 2.0]))
    assert series == [(1, 1.0, True), (2, 1.0, False), (3, 2.0, True)]


def test_breakthrough_constant():
    series = breakthrough_series(star([4.0] * 5))
    assert [s[1] for s in series] == [4.0] * 5
    assert [s[2] for s in series] == [True] + [False] * 4


@given(st.lists(st.floats(allow_nan=False) | st.just(-math.inf), min_size=1, max_size=50))
def test_breakthrough_running_max(scores):
    series = breakthrough_series(star(scores))
    assert len(series) == len(scores)
    running = -math.inf
    for (count, best, flag), s in zip(series, scores):
        expected_flag = count == 1 or s > running
        running = max(running, s) if count > 1 else s
        assert best == running and flag == expected_flag


# -- run_search ------------------------------------------------------------------

def synthetic_run(seed, budget=100, **kw):
    task = synthetic_task(4)
    return run_search(task, GeneratorHandle.mutator(task.schedule), budget, seed=seed, **kw)


def test_run_search_size_and_progress():
    tree = synthetic_run(0)
    assert len(tree) == 101
    root = tree.node(tree.root_id).task_score
    assert tree.node(best_solution(tree)).task_score >= root


def test_run_search_deterministic():
    a = search.export_tree(synthetic_run(5), "r", "synthetic")
    b = search.export_tree(synthetic_run(5), "r", "synthetic")
    assert a == b
    c = search.export_tree(synthetic_run(6), "r", "synthetic")
    assert a != c


def test_parallel_workers_deterministic():
    a = search.export_tree(synthetic_run(2, 40, workers=4), "r", "t")
    b = search.export_tree(synthetic_run(2, 40, workers=4), "r", "t")
    assert a == b and len(a["nodes"]) == 41


def test_run_search_rejects_zero_budget():
    with pytest.raises(ValueError):
        synthetic_run(0, budget=0)


def test_state_round_trip():
    tree = synthetic_run(1, 30)
    rebuilt = search.tree_from_state(search.tree_state(tree))
    assert search.export_tree(rebuilt, "r", "t") == search.export_tree(tree, "r", "t")


def test_score_history_root_to_node():
    tree = chain([0.0, 1.0, 2.0])
    hist = search.score_history(tree, 2)
    assert [s for s, _ in hist] == [0.0, 1.0, 2.0]


def test_generation_failure_records_failed_node(tmp_path):
    gen = tmp_path / "gen.py"
    gen.write_text("import sys, json\nfor line in sys.stdin:\n"
                   "    print(json.dumps({'error': 'no'}), flush=True)\n")
    task = synthetic_task(2)
    import sys
    handle = GeneratorHandle.external(command=f"{sys.executable} {gen}",
                                      payload_kind="parameter_config")
    try:
        tree = run_search(task, handle, 3, seed=0)
    finally:
        handle.close()
    assert len(tree) == 4
    for n in list(tree)[1:]:
        assert n.task_score == -math.inf
        assert n.candidate.provenance.get("generation_failed")
        assert n.eval_record.notes["generation_failed"]
