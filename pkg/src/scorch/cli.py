"""``scorch`` command line.

Exit codes: 0 on completion (however poor the scores), 1 when a requested
run or file does not exist, 2 on bad usage or infrastructure failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

from . import runs, sandbox, search
from .generators import GenerationError, GeneratorHandle, build_advice
from .tasks import REGISTRY, get_task

EXIT_OK, EXIT_MISSING, EXIT_FAILURE = 0, 1, 2

GLOBAL_DEFAULTS = {
    "output_root": None,
    "seed": 0,
    "c_puct": search.DEFAULT_C_PUCT,
    "budget": 50,
    "wall_time_s": 300.0,
    "max_output_kb": 256,
}

log = logging.getLogger("scorch")


class CommandError(Exception):
    def __init__(self, message: str, code: int = EXIT_FAILURE):
        super().__init__(message)
        self.code = code


def _global_flags() -> argparse.ArgumentParser:
    # SUPPRESS keeps a flag given before the subcommand from being reset after it
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g = p.add_argument_group("global options")
    g.add_argument("--output-root", help=f"run storage root (default ${runs.OUTPUT_ROOT_ENV} "
                                         f"or ./{runs.DEFAULT_OUTPUT_ROOT})")
    g.add_argument("--seed", type=int, help="search seed (default 0)")
    g.add_argument("--c-puct", type=float, help="exploration constant (default 1.0)")
    g.add_argument("--budget", type=int, help="number of expansions (default 50)")
    g.add_argument("--wall-time-s", type=float, help="per-candidate time limit (default 300)")
    g.add_argument("--max-output-kb", type=int, help="captured output cap in KiB (default 256)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(prog="scorch", parents=[common],
                                     description="Score-driven tree search over candidate solutions.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="run a search")
    p.add_argument("--task", required=True)
    p.add_argument("--generator", choices=["mutator", "external"], default="mutator")
    p.add_argument("--generator-command", help="external generator launched as a child process")
    p.add_argument("--generator-url", help="external generator reached over HTTP")
    p.add_argument("--generator-timeout-s", type=float, default=120.0)
    p.add_argument("--payload-kind", choices=["program_text", "parameter_config"],
                   help="what an external generator produces (default program_text)")
    p.add_argument("--run-id", help="run directory name (default derived from settings)")
    p.add_argument("--workers", type=int, default=1, help="concurrent evaluations")
    p.add_argument("--dimension", type=int, help="synthetic task dimension")
    p.add_argument("--idea", action="append", default=[], metavar="TEXT",
                   help="research idea passed to the generator (repeatable)")
    p.add_argument("--ideas-file", type=Path, help="file of ideas separated by blank lines")
    p.add_argument("--recombine", nargs=2, type=Path, metavar=("A", "B"),
                   help="two solution summaries to hybridize")
    p.add_argument("--record-wall-time", action="store_true",
                   help="keep wall times in the tree export (breaks byte-identity)")
    p.add_argument("--no-plot", action="store_true", help="skip the PNG figure")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("export", parents=[common], help="re-emit an export of a stored run")
    p.add_argument("run_id")
    p.add_argument("--what", choices=["tree", "breakthroughs"], default="tree")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("eval-integrals", parents=[common],
                       help="evaluate the oscillatory integrator on the benchmark")
    p.add_argument("--split", choices=["train", "test", "all", "smoke"], default="test")
    p.add_argument("--scheme", default="3.141592653589793,1.15,60", help="L0,r,K")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--report", type=Path, help="directory for CSV and PNG copies")
    p.set_defaults(func=cmd_eval_integrals)

    p = sub.add_parser("forecast", parents=[common], help="forecast a series with config selection")
    p.add_argument("--data", type=Path, required=True, help="CSV with timestamp,value")
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--configs", default="builtin", help="config file or 'builtin'")
    p.add_argument("--report", type=Path, help="directory for CSV and PNG copies")
    p.set_defaults(func=cmd_forecast)

    p = sub.add_parser("tasks", parents=[common], help="inspect built-in tasks")
    tsub = p.add_subparsers(dest="tasks_command", required=True)
    tsub.add_parser("list", help="list task ids").set_defaults(func=cmd_tasks_list)
    return parser


def _opt(args, name):
    return getattr(args, name, GLOBAL_DEFAULTS[name])


def _limits(args) -> sandbox.Limits:
    return sandbox.Limits(wall_time_s=_opt(args, "wall_time_s"),
                          output_bytes=_opt(args, "max_output_kb") * 1024)


def _write_table(rows: list[dict], fields: list[str], out) -> None:
    w = csv.DictWriter(out, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    w.writerows(rows)


def _num(x: float) -> str:
    return repr(float(x)) if math.isfinite(x) else ("nan" if math.isnan(x) else
                                                    ("inf" if x > 0 else "-inf"))


# -- run ---------------------------------------------------------------------

def _make_task(args):
    kwargs = {}
    if args.dimension is not None:
        if args.task != "synthetic":
            raise CommandError("--dimension only applies to the synthetic task")
        kwargs["dimension"] = args.dimension
    try:
        return get_task(args.task, **kwargs)
    except KeyError as exc:
        raise CommandError(exc.args[0]) from None


def _make_generator(args, task) -> GeneratorHandle:
    if args.generator == "mutator":
        if args.generator_command or args.generator_url:
            raise CommandError("--generator-command/--generator-url need --generator external")
        return GeneratorHandle.mutator(task.schedule)
    if bool(args.generator_command) == bool(args.generator_url):
        raise CommandError("external generator needs exactly one of "
                           "--generator-command or --generator-url")
    return GeneratorHandle.external(args.generator_command, args.generator_url,
                                    args.generator_timeout_s,
                                    args.payload_kind or "program_text")


def _advice(args, task):
    ideas = list(args.idea)
    if args.ideas_file:
        text = args.ideas_file.read_text()
        ideas += [block.strip() for block in text.split("\n\n") if block.strip()]
    pair = None
    if args.recombine:
        pair = tuple(p.read_text() for p in args.recombine)
    if not ideas and pair is None:
        return None
    return build_advice(task, ideas, pair)


def cmd_run(args) -> int:
    budget, seed, c_puct = _opt(args, "budget"), _opt(args, "seed"), _opt(args, "c_puct")
    if budget < 1:
        raise CommandError("--budget must be at least 1")
    if args.workers < 1:
        raise CommandError("--workers must be at least 1")
    task = _make_task(args)
    generator = _make_generator(args, task)
    try:
        advice = _advice(args, task)
    except OSError as exc:
        raise CommandError(f"cannot read advice: {exc}") from None
    try:
        generator.connect()
    except GenerationError as exc:
        raise CommandError(f"generator unreachable: {exc}") from None

    try:
        limits = _limits(args)
        settings = generator.describe()
        if args.dimension is not None:
            settings["dimension"] = args.dimension
        root = runs.output_root(_opt(args, "output_root"))
        run_id = args.run_id or runs.default_run_id(task.task_id, settings, budget, c_puct, seed)
        run_id, directory = runs.claim_run_dir(root, run_id, explicit=bool(args.run_id))
        manifest = runs.RunManifest(
            run_id=run_id, task_id=task.task_id, generator=settings, budget=budget,
            c_puct=c_puct, seed=seed,
            limits={"wall_time_s": limits.wall_time_s, "output_bytes": limits.output_bytes,
                    "memory_mb": limits.memory_mb},
            workers=args.workers, deterministic=not args.record_wall_time)
        manifest.write(directory)
        log.info("run %s -> %s", run_id, directory)

        try:
            tree = search.run_search(task, generator, budget, c_puct, seed, limits,
                                     workers=args.workers, advice=advice,
                                     scratch_root=str(directory))
        except sandbox.SandboxError as exc:
            manifest.status = "failed"
            manifest.finished_at = runs._now()
            manifest.summary = {"error": str(exc)}
            manifest.write(directory)
            raise CommandError(f"sandbox failure: {exc}") from None
    finally:
        generator.close()

    manifest.artifacts = runs.write_exports(directory, tree, manifest, plot=not args.no_plot)
    best = search.best_solution(tree)
    manifest.status = "completed"
    manifest.finished_at = runs._now()
    manifest.summary = {"nodes": len(tree), "best_node": best,
                        "best_score": search._score_json(tree.node(best).task_score),
                        "root_score": search._score_json(tree.node(tree.root_id).task_score)}
    manifest.write(directory)
    print(f"run_id\t{run_id}")
    print(f"directory\t{directory}")
    print(f"nodes\t{len(tree)}")
    print(f"best_node\t{best}")
    print(f"best_score\t{_num(tree.node(best).task_score)}")
    return EXIT_OK


# -- export ------------------------------------------------------------------

def cmd_export(args) -> int:
    directory = runs.run_dir(runs.output_root(_opt(args, "output_root")), args.run_id)
    if not (directory / "manifest.json").exists():
        raise CommandError(f"no run {args.run_id!r} under {directory.parent}", EXIT_MISSING)
    try:
        text = runs.export_text(directory, args.what)
    except runs.RunError as exc:
        raise CommandError(str(exc), EXIT_MISSING) from None
    sys.stdout.write(text)
    return EXIT_OK


# -- integrals ---------------------------------------------------------------

INTEGRAL_FIELDS = ["spec_id", "value", "reference", "fractional_error", "method_used"]
PASS_THRESHOLD = 0.03


def evaluate_integrals(split: str, scheme, tol: float) -> list[dict]:
    from .quadrature import integrate_oscillatory
    from .tasks.base import integral_score
    from .tasks.integrals import SMOKE, fractional_error, load_specs

    specs = list(SMOKE) if split == "smoke" else load_specs(split=split)
    rows = []
    for spec in specs:
        answer = spec.reference_answer
        try:
            res = integrate_oscillatory(spec.integrand, spec.lower_limit, scheme, tol)
            value, method = res.value, res.method_used
        except Exception as exc:  # noqa: BLE001 - reported as a failed row
            value, method = math.nan, f"error:{type(exc).__name__}"
        rows.append({"spec_id": spec.spec_id, "value": value, "reference": answer,
                     "fractional_error": fractional_error(value, answer),
                     "method_used": method, "score": integral_score(value, answer)})
    return rows


def _integral_text(rows) -> str:
    from .tasks.base import integral_task_score

    out = io.StringIO()
    _write_table([{**r, **{k: _num(r[k]) for k in ("value", "reference", "fractional_error")}}
                  for r in rows], INTEGRAL_FIELDS, out)
    solved = sum(r["fractional_error"] < PASS_THRESHOLD for r in rows)
    aggregate = integral_task_score([r["score"] for r in rows])
    out.write(f"# aggregate_score={_num(aggregate)} solved={solved}/{len(rows)} "
              f"threshold={PASS_THRESHOLD}\n")
    return out.getvalue()


def cmd_eval_integrals(args) -> int:
    from .quadrature import SegmentScheme

    try:
        scheme = SegmentScheme.parse(args.scheme)
    except ValueError as exc:
        raise CommandError(f"bad --scheme: {exc}") from None
    if not args.tol > 0:
        raise CommandError("--tol must be positive")
    rows = evaluate_integrals(args.split, scheme, args.tol)
    text = _integral_text(rows)
    sys.stdout.write(text)
    if args.report:
        from .plotting import integrals_figure

        args.report.mkdir(parents=True, exist_ok=True)
        (args.report / f"integrals_{args.split}.csv").write_text(text)
        integrals_figure(rows, args.report / f"integrals_{args.split}.png", PASS_THRESHOLD)
    return EXIT_OK


# -- forecast ----------------------------------------------------------------

def cmd_forecast(args) -> int:
    from .forecaster import PRESETS, SelectionError, SeriesView, forecast_auto, load_configs

    if args.horizon < 1:
        raise CommandError("--horizon must be at least 1")
    if not args.data.exists():
        raise CommandError(f"no such file: {args.data}", EXIT_MISSING)
    try:
        series = SeriesView.read_csv(args.data)
        configs = PRESETS if args.configs == "builtin" else load_configs(args.configs)
        pred, sel = forecast_auto(series, configs, args.horizon)
    except FileNotFoundError as exc:
        raise CommandError(str(exc), EXIT_MISSING) from None
    except (ValueError, KeyError, SelectionError) as exc:
        raise CommandError(str(exc)) from None

    score_rows = [{"config": name,
                   "validation_mase": _num(score),
                   "selected": str(name == sel.best.name).lower(),
                   "error": sel.failures.get(name, "")}
                  for name, score in sel.scores.items()]
    stamps = series.future_index(args.horizon)
    fc_rows = [{"timestamp": t.strftime("%Y-%m-%dT%H:%M:%SZ"), "forecast": _num(v)}
               for t, v in zip(stamps, pred)]
    scores_out, fc_out = io.StringIO(), io.StringIO()
    _write_table(score_rows, ["config", "validation_mase", "selected", "error"], scores_out)
    _write_table(fc_rows, ["timestamp", "forecast"], fc_out)
    sys.stdout.write(scores_out.getvalue() + "\n" + fc_out.getvalue())
    if args.report:
        from .plotting import forecast_figure

        args.report.mkdir(parents=True, exist_ok=True)
        (args.report / "config_mase.csv").write_text(scores_out.getvalue())
        (args.report / "forecast.csv").write_text(fc_out.getvalue())
        forecast_figure(series.timestamps, series.values, stamps, pred,
                        args.report / "forecast.png", title=f"{args.data.name}: {sel.best.name}")
    return EXIT_OK


# -- tasks -------------------------------------------------------------------

def cmd_tasks_list(args) -> int:
    out = io.StringIO()
    w = csv.writer(out, delimiter="\t", lineterminator="\n")
    w.writerow(["task_id", "split_policy", "description"])
    for task_id in sorted(REGISTRY):
        task = get_task(task_id)
        w.writerow([task_id, task.split_policy, task.description])
    sys.stdout.write(out.getvalue())
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except CommandError as exc:
        print(f"scorch: error: {exc}", file=sys.stderr)
        return exc.code
    except runs.RunError as exc:
        print(f"scorch: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except json.JSONDecodeError as exc:
        print(f"scorch: error: malformed JSON: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
