import csv
import io
import json
import math
import subprocess
import sys

import jsonschema
import numpy as np
import pandas as pd
import pytest

from scorch import cli, search
from scorch.runs import RunManifest


def call(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def fields(stdout):
    return dict(line.split("\t", 1) for line in stdout.strip().splitlines())


def synthetic_run(capsys, *extra):
    code, out, err = call(capsys, "run", "--task", "synthetic", "--budget", "20", "--no-plot",
                          *extra)
    assert code == 0, err
    return fields(out)


def test_run_creates_tree(capsys, output_root):
    info = synthetic_run(capsys)
    assert info["nodes"] == "21"
    run = output_root / "runs" / info["run_id"]
    for name in ("manifest.json", "tree.json", "breakthroughs.csv", "timings.csv"):
        assert (run / name).exists()
    manifest = RunManifest.read(run)
    assert manifest.status == "completed" and manifest.budget == 20


def test_default_budget_is_fifty(capsys, output_root):
    code, out, _ = call(capsys, "run", "--task", "synthetic", "--no-plot")
    assert code == 0 and fields(out)["nodes"] == "51"


def test_plot_written(capsys, output_root):
    code, out, _ = call(capsys, "run", "--task", "synthetic", "--budget", "5")
    assert code == 0
    assert list((output_root / "runs" / fields(out)["run_id"]).glob("*.png"))


def test_global_flags_either_side(capsys, output_root):
    synthetic_run(capsys, "--seed", "3", "--run-id", "after")
    code, out, err = call(capsys, "--seed", "3", "run", "--task", "synthetic", "--budget", "20",
                          "--no-plot", "--run-id", "before")
    assert code == 0, err
    assert (output_root / "runs" / "after" / "tree.json").read_text().replace("after", "X") == \
        (output_root / "runs" / "before" / "tree.json").read_text().replace("before", "X")
    assert RunManifest.read(output_root / "runs" / "before").seed == 3


def test_explicit_output_root(capsys, tmp_path, output_root):
    other = tmp_path / "elsewhere"
    info = synthetic_run(capsys, "--output-root", str(other))
    assert (other / "runs" / info["run_id"] / "tree.json").exists()
    assert not output_root.exists()


def test_repeat_run_id_clash(capsys, output_root):
    synthetic_run(capsys, "--run-id", "fixed")
    code, _, err = call(capsys, "run", "--task", "synthetic", "--budget", "2", "--no-plot",
                        "--run-id", "fixed")
    assert code != 0 and "fixed" in err


def test_derived_run_ids_stay_unique(capsys, output_root):
    first = synthetic_run(capsys)["run_id"]
    second = synthetic_run(capsys)["run_id"]
    assert first != second and second.startswith(first)


def test_unknown_task(capsys, output_root):
    code, out, err = call(capsys, "run", "--task", "nonesuch")
    assert code == cli.EXIT_FAILURE and out == "" and "nonesuch" in err


def test_unreachable_generator(capsys, output_root):
    code, _, err = call(capsys, "run", "--task", "synthetic", "--generator", "external",
                        "--generator-command", "/nonexistent/gen")
    assert code == cli.EXIT_FAILURE and "unreachable" in err


def test_export_tree_matches_schema(capsys, output_root):
    run_id = synthetic_run(capsys)["run_id"]
    code, out, _ = call(capsys, "export", run_id, "--what", "tree")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, search.TREE_SCHEMA)
    assert len(doc["nodes"]) == 21
    # deterministic exports carry no wall-clock values
    assert all(n["wall_time_ms"] is None for n in doc["nodes"])


def test_export_is_idempotent_and_read_only(capsys, output_root):
    run_id = synthetic_run(capsys)["run_id"]
    run = output_root / "runs" / run_id
    before = {p.name: p.read_bytes() for p in run.iterdir() if p.is_file()}
    first = call(capsys, "export", run_id)[1]
    second = call(capsys, "export", run_id)[1]
    after = {p.name: p.read_bytes() for p in run.iterdir() if p.is_file()}
    assert first == second and before == after


def test_export_breakthroughs(capsys, output_root):
    run_id = synthetic_run(capsys)["run_id"]
    code, out, _ = call(capsys, "export", run_id, "--what", "breakthroughs")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 21
    assert [int(r["node_count"]) for r in rows] == list(range(1, 22))
    best = [float(r["max_score"]) for r in rows]
    assert best == sorted(best)
    assert rows[0]["is_breakthrough"] == "true"


def test_export_missing_run(capsys, output_root):
    code, out, err = call(capsys, "export", "no-such-run")
    assert code == cli.EXIT_MISSING and out == "" and "no-such-run" in err


def test_tasks_list(capsys):
    code, out, _ = call(capsys, "tasks", "list")
    rows = list(csv.reader(io.StringIO(out), delimiter="\t"))
    assert code == 0 and rows[0] == ["task_id", "split_policy", "description"]
    assert sorted(r[0] for r in rows[1:]) == ["forecast", "integrals", "synthetic"]


def test_eval_integrals_smoke(capsys, tmp_path):
    code, out, _ = call(capsys, "eval-integrals", "--split", "smoke", "--report",
                        str(tmp_path / "rep"))
    assert code == 0
    body, footer = out.rstrip("\n").rsplit("\n", 1)
    rows = list(csv.DictReader(io.StringIO(body)))
    assert list(rows[0]) == cli.INTEGRAL_FIELDS
    assert all(float(r["fractional_error"]) < 0.03 for r in rows)
    assert footer.startswith("# aggregate_score=") and f"solved={len(rows)}/{len(rows)}" in footer
    assert (tmp_path / "rep" / "integrals_smoke.csv").read_text() == out
    assert (tmp_path / "rep" / "integrals_smoke.png").exists()


def test_eval_integrals_bad_scheme(capsys):
    code, _, err = call(capsys, "eval-integrals", "--scheme", "1,0.5,10")
    assert code == cli.EXIT_FAILURE and "scheme" in err


def test_forecast(capsys, tmp_path):
    t = np.arange(120)
    data = tmp_path / "s.csv"
    pd.DataFrame({"timestamp": pd.date_range("2024-01-01", periods=120).strftime("%Y-%m-%d"),
                  "value": 20 + 0.1 * t + 3 * np.sin(2 * np.pi * t / 7)}).to_csv(data, index=False)
    code, out, err = call(capsys, "forecast", "--data", str(data), "--horizon", "7",
                          "--report", str(tmp_path / "rep"))
    assert code == 0, err
    scores, fc = out.split("\n\n")
    table = list(csv.DictReader(io.StringIO(scores)))
    assert len(table) == 8 and sum(r["selected"] == "true" for r in table) == 1
    chosen = next(r for r in table if r["selected"] == "true")
    assert float(chosen["validation_mase"]) == min(
        float(r["validation_mase"]) for r in table if not math.isnan(float(r["validation_mase"])))
    rows = list(csv.DictReader(io.StringIO(fc)))
    assert len(rows) == 7 and rows[0]["timestamp"] == "2024-04-30T00:00:00Z"
    for name in ("config_mase.csv", "forecast.csv", "forecast.png"):
        assert (tmp_path / "rep" / name).exists()


def test_forecast_missing_file(capsys, tmp_path):
    code, _, err = call(capsys, "forecast", "--data", str(tmp_path / "none.csv"), "--horizon", "3")
    assert code == cli.EXIT_MISSING and "none.csv" in err


def test_module_entry_point(output_root):
    proc = subprocess.run([sys.executable, "-m", "scorch", "tasks", "list"],
                          capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0 and proc.stdout.startswith("task_id\t")


def test_help_lists_commands(capsys):
    with pytest.raises(SystemExit):
        cli.main(["--help"])
    out = capsys.readouterr().out
    for name in ("run", "export", "eval-integrals", "forecast", "tasks"):
        assert name in out
