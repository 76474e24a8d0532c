"""End-to-end acceptance checks, one test per criterion.

Each test records a pass/fail line that is repeated in the pytest summary.
"""

import math
import random
import time

import mpmath as mp
import numpy as np
import pandas as pd

from acceptance_log import record
from scorch import cli, search
from scorch.candidates import Candidate
from scorch.forecaster import ForecastConfig, SeriesView, forecast, holdout_mase, preset
from scorch.generators import GeneratorHandle
from scorch.quadrature import SegmentScheme, baseline_quad, euler_accelerate, integrate_oscillatory
from scorch.search import (breakthrough_series, compute_rank_scores, expand, init_tree,
                           select_node)
from scorch.tasks import integral_score, synthetic_task
from scorch.tasks.integrals import SMOKE, fractional_error, load_specs
from treegen import random_tree


def check(number, title, passed, detail):
    record(number, title, passed, detail)
    assert passed, detail


def descendants(tree, u):
    out, stack = 0, list(tree.children[u])
    while stack:
        v = stack.pop()
        out += 1
        stack.extend(tree.children[v])
    return out


def stable_sort_ranks(tree):
    nodes = sorted(tree.nodes.values(), key=lambda n: n.creation_index)
    order = sorted(nodes, key=lambda n: n.task_score)
    n = len(order)
    return {node.id: (1.0 if n == 1 else i / (n - 1)) for i, node in enumerate(order)}


def test_1_tree_mechanics():
    rng = random.Random(1)
    failures, spent = 0, 0.0
    for _ in range(1000):
        size = rng.randint(1, 200)
        scores = [rng.choice([-math.inf, float(rng.randint(-3, 3)), rng.uniform(-10, 10)])
                  for _ in range(size)]
        parents = [rng.randrange(i) for i in range(1, size)]
        started = time.perf_counter()
        tree = init_tree(Candidate.config({"i": 0}), scores[0])
        for i, (p, s) in enumerate(zip(parents, scores[1:]), 1):
            expand(tree, p, Candidate.config({"i": i}), s)
        ranks = compute_rank_scores(tree).rank_score
        spent += time.perf_counter() - started
        visits_ok = all(tree.node(u).visit_count == 1 + descendants(tree, u) for u in tree.nodes)
        total_ok = tree.n_total == sum(tree.node(u).visit_count for u in tree.nodes)
        if not (visits_ok and total_ok and ranks == stable_sort_ranks(tree)):
            failures += 1
    check(1, "tree mechanics match oracle", failures == 0 and spent < 10,
          f"{1000 - failures}/1000 sequences exact, {spent:.2f}s in tree operations")


def test_2_puct_monotone_invariance():
    rng = random.Random(2)
    transforms = [lambda x: 3 * x + 7, lambda x: math.atan(x), lambda x: x ** 3,
                  lambda x: math.copysign(math.log1p(abs(x)), x), lambda x: math.exp(x / 50)]
    changed = 0
    for _ in range(200):
        tree = random_tree(rng, rng.randint(1, 80), c_puct=rng.choice([0.3, 1.0, 4.0]),
                           tie_heavy=rng.random() < 0.3)
        before = select_node(tree)
        g = rng.choice(transforms)
        for node in tree:
            if math.isfinite(node.task_score):
                node.task_score = g(node.task_score)
        if select_node(tree) != before:
            changed += 1
    check(2, "PUCT choice invariant to monotone rescoring", changed == 0,
          f"{200 - changed}/200 trees kept the same selection")


def test_3_search_effectiveness():
    task = synthetic_task(4)
    started = time.perf_counter()
    hits, monotone, detail = 0, 0, []
    for seed in range(10):
        tree = search.run_search(task, GeneratorHandle.mutator(task.schedule), 500, seed=seed)
        best = tree.node(search.best_solution(tree)).task_score
        series = breakthrough_series(tree)
        maxima = [s[1] for s in series]
        monotone += all(a <= b for a, b in zip(maxima, maxima[1:]))
        hits += best >= -0.01
        detail.append(f"{best:.4g}")
    elapsed = time.perf_counter() - started
    check(3, "synthetic search reaches the optimum",
          hits >= 9 and monotone == 10 and elapsed < 30,
          f"{hits}/10 seeds within 0.01, {monotone}/10 monotone, {elapsed:.1f}s; "
          f"best scores {', '.join(detail)}")


def test_4_quadrature_benchmark():
    started = time.perf_counter()
    scheme = SegmentScheme()

    def solved(specs):
        count = 0
        for spec in specs:
            res = integrate_oscillatory(spec.integrand, spec.lower_limit, scheme, 1e-6)
            count += fractional_error(res.value, spec.reference_answer) < 0.03
        return count

    test_specs = load_specs(split="test")
    held_out = solved(test_specs)
    smoke = solved(SMOKE)
    elapsed = time.perf_counter() - started
    check(4, "oscillatory integrals within 3%",
          held_out >= 15 and smoke == len(SMOKE) and elapsed < 60,
          f"test {held_out}/{len(test_specs)}, smoke {smoke}/{len(SMOKE)}, {elapsed:.1f}s")


def test_5_drop_in():
    rng = random.Random(5)
    identical = 0
    for _ in range(50):
        a, b, c = rng.uniform(0.3, 4), rng.uniform(0, 3), rng.uniform(-10, 10)
        kind = rng.randrange(3)
        if kind == 0:
            f = lambda x, a=a, b=b, c=c: c * np.exp(-a * x) * (1 + b * x)  # noqa: E731
        elif kind == 1:
            f = lambda x, a=a, b=b, c=c: c / (1 + a * x * x) ** (1 + b)  # noqa: E731
        else:
            f = lambda x, a=a, b=b, c=c: c * np.exp(-a * x * x) * np.cos(b * x)  # noqa: E731
        base = baseline_quad(f, 0.0)
        assert base.converged
        res = integrate_oscillatory(f, 0.0)
        identical += res.method_used == "baseline" and res.value == base.value
    check(5, "smooth integrands pass through unchanged", identical == 50,
          f"{identical}/50 bit-for-bit with method_used=baseline")


def test_6_euler_acceleration():
    mp.mp.dps = 40
    terms = [(-1) ** k / (k + 1) for k in range(12)]
    oracle = mp.log(2)
    raw_err = float(abs(mp.fsum(mp.mpf(t) for t in terms) - oracle))
    est, _ = euler_accelerate(terms)
    acc_err = float(abs(mp.mpf(est) - oracle))
    check(6, "Euler transform on the alternating harmonic series",
          acc_err < 1e-6 and 3e-2 < raw_err < 5e-2,
          f"accelerated error {acc_err:.3g}, raw partial-sum error {raw_err:.3g}")


def test_7_forecaster_recovery():
    started = time.perf_counter()
    weekly = np.array([2.0, -1.0, 0.0, -2.0, 0.0, -1.0, 2.0])
    cfg = ForecastConfig("recover", (
        {"type": "base", "method": "median_all"},
        {"type": "trend", "degree": 1, "damping_factor": 1.0},
        {"type": "seasonal", "window_multiplier": 1.0},
    ))
    worst = 0.0
    for n, level, slope in [(70, 10.0, 0.5), (140, -3.0, 0.02), (203, 100.0, -1.25)]:
        t = np.arange(n + 14)
        y = level + slope * t + weekly[t % 7]
        series = SeriesView.build(pd.date_range("2023-03-06", periods=n), y[:n])
        worst = max(worst, float(np.max(np.abs(forecast(series, cfg, 14) - y[n:]))))

    rng = np.random.default_rng(7)
    naive = preset("seasonal_naive_baseline")
    scores = []
    for _ in range(400):
        y = np.empty(147)
        y[:7] = rng.normal(50, 5, 7)
        for i in range(7, 147):
            y[i] = y[i - 7] + rng.normal()
        series = SeriesView.build(pd.date_range("2023-03-06", periods=140), y[:140])
        scores.append(holdout_mase(series, y[140:], naive))
    mean_mase = float(np.mean(scores))
    elapsed = time.perf_counter() - started
    check(7, "forecaster recovery and seasonal-naive MASE",
          worst < 1e-6 and abs(mean_mase - 1) <= 0.05 and elapsed < 5,
          f"max recovery error {worst:.3g}, seasonal-naive MASE {mean_mase:.4f}, "
          f"{elapsed:.2f}s")


def test_8_integral_score():
    spots = [abs(integral_score(3.7, 3.7)),
             abs(integral_score(7.4, 3.7) + math.log(2)),
             abs(integral_score(0.0, -2.5) + math.log(2))]
    rng = random.Random(8)
    worst = 0.0
    for _ in range(1000):
        answer = rng.choice([-1, 1]) * 10 ** rng.uniform(-3, 3)
        response = answer * (1 + rng.uniform(-3, 3))
        c = rng.choice([-1, 1]) * 10 ** rng.uniform(-3, 3)
        worst = max(worst, abs(integral_score(c * response, c * answer)
                               - integral_score(response, answer)))
    check(8, "integral score spot values and scale invariance",
          max(spots) <= 1e-12 and worst <= 1e-9,
          f"spot error {max(spots):.2g}, max scale-invariance gap {worst:.2g} over 1000 triples")


def test_9_determinism(tmp_path, capsys):
    outputs = []
    for name in ("a", "b"):
        root = tmp_path / name
        code = cli.main(["--output-root", str(root), "run", "--task", "synthetic",
                         "--seed", "11", "--no-plot"])
        run_id = dict(line.split("\t", 1)
                      for line in capsys.readouterr().out.strip().splitlines())["run_id"]
        assert code == 0
        run = root / "runs" / run_id
        outputs.append(((run / "tree.json").read_bytes(), (run / "breakthroughs.csv").read_bytes()))
    same_tree = outputs[0][0] == outputs[1][0]
    same_bt = outputs[0][1] == outputs[1][1]
    check(9, "repeat runs export identical bytes", same_tree and same_bt,
          f"tree.json identical={same_tree}, breakthroughs.csv identical={same_bt}")
