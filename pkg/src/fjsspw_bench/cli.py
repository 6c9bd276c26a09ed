"""Command line entry point: ``fjsspw-bench <command> ...``.

Environment overrides: ``FJSSPW_OUTPUT_DIR`` (default output directory) and
``FJSSPW_JOBS`` (default worker pool size).
"""

from __future__ import annotations

import argparse
import contextlib
import hashlib
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .analysis import (
    friedman_nemenyi,
    gap_curve,
    gap_plot,
    minizinc_score,
    nemenyi_diagram,
    progress_plot,
)
from .analysis.plots import gantt_chart
from .export import export_cp_text, export_milp_text
from .extender import ExtendParams, extend_instance, extension_metadata
from .harness import (
    BestKnownStore,
    ExperimentPlan,
    read_records,
    run_experiment,
    solve,
    summarize,
    update_best_known,
    write_summary_csv,
)
from .instance_io import (
    Catalog,
    load_catalog,
    read_instance,
    write_characteristics_csv,
    write_fjsspw,
)
from .model import CHARACTERISTIC_FIELDS, FilterSpec, compute_characteristics, filter_catalog
from .schedule import decode_schedule

log = logging.getLogger("fjsspw_bench")


@contextlib.contextmanager
def _out(path):
    if path in (None, "-"):
        yield sys.stdout
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        yield fh


def _bound(text: str):
    """``name:lo:hi`` with either end optional, e.g. ``beta:0.5:`` or ``N::100``."""
    try:
        name, lo, hi = text.split(":")
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected name:lo:hi, got {text!r}")
    if name not in CHARACTERISTIC_FIELDS:
        raise argparse.ArgumentTypeError(f"unknown characteristic {name!r}")
    return name, (float(lo) if lo else None, float(hi) if hi else None)


def _filter_spec(args) -> FilterSpec:
    return FilterSpec(dict(args.bound or []), frozenset(args.source) if args.source else None)


def _catalog_or_files(args) -> Catalog:
    if getattr(args, "catalog", None):
        return load_catalog(args.catalog, lenient=args.lenient, jobs=args.jobs)
    from .instance_io import CatalogEntry

    catalog = Catalog()
    for path in args.inputs:
        inst = read_instance(path, lenient=args.lenient)
        catalog.entries.append(CatalogEntry(inst.id, Path(path).parent.name, inst, compute_characteristics(inst), path))
    return catalog


def cmd_stats(args):
    catalog = _catalog_or_files(args)
    with _out(args.out) as fh:
        write_characteristics_csv(catalog.rows(), fh)
    return 1 if catalog.diagnostics and args.strict else 0


def cmd_filter(args):
    catalog = _catalog_or_files(args)
    for ident in filter_catalog(catalog.rows(), _filter_spec(args)):
        print(ident)
    return 0


def cmd_extend(args):
    inst = read_instance(args.input, fmt="fjssp")
    params = ExtendParams(args.workers, args.lb, args.ub, args.seed)
    ext = extend_instance(inst, params)
    text = write_fjsspw(ext)
    Path(args.output).parent.mkdir(parents=True, exist_ok=True)
    Path(args.output).write_text(text)
    meta = extension_metadata(inst, params)
    meta["sha256"] = hashlib.sha256(text.encode()).hexdigest()
    Path(str(args.output) + ".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    if args.seed is None:
        log.warning("no seed given: %s is not reproducible", args.output)
    return 0


def _ga_options(args) -> dict:
    opts = {}
    for key, attr in (("population", "ga_pop"), ("tournament", "ga_tournament"), ("elitism", "ga_elitism"),
                      ("crossover_rate", "ga_crossover"), ("mutation_rate", "ga_mutation"),
                      ("max_evaluations", "ga_budget")):
        value = getattr(args, attr, None)
        if value is not None:
            opts[key] = value
    return opts


def cmd_solve(args):
    inst = read_instance(args.input, lenient=args.lenient)
    options = _ga_options(args) if args.solver == "ga" else {"earliest_finish": args.earliest_finish}
    run = solve(args.solver, inst, args.seed, args.time_limit, options, args.deterministic_time)
    with _out(args.out) as fh:
        fh.write(json.dumps(run.to_dict(), indent=2, sort_keys=True) + "\n")
    if args.schedule or args.gantt:
        sched = decode_schedule(inst, run.best_encoding)
        if args.schedule:
            Path(args.schedule).write_text(sched.to_json())
        if args.gantt:
            Path(args.gantt).write_text(gantt_chart(sched, title=f"{inst.id} ({run.solver})"))
    return 0


def cmd_run(args):
    catalog = _catalog_or_files(args)
    ids = filter_catalog(catalog.rows(), _filter_spec(args))
    instances = {e.id: e.instance for e in catalog if e.id in set(ids)}
    solvers = {}
    for name in args.solvers.split(","):
        solvers[name] = _ga_options(args) if name == "ga" else {}
    plan = ExperimentPlan(ids, solvers, args.repetitions, args.seed, args.time_limit, args.out_dir, args.jobs,
                          args.deterministic_time)
    written = run_experiment(plan, instances, resume=args.resume)
    print(f"{len(written)} records appended to {plan.records_path}")
    return 0


def _summary(args):
    records = read_records(args.records)
    store = BestKnownStore.load(args.best_known) if getattr(args, "best_known", None) else None
    return summarize(records, store), store


def cmd_score(args):
    summary, _ = _summary(args)
    report = minizinc_score(summary.matrix, both_infeasible=0.0 if args.both_infeasible_zero else 0.5)
    with _out(args.out) as fh:
        fh.write("solver,score\n")
        for solver, score in report.scores.items():
            fh.write(f"{solver},{score:.6f}\n")
    return 0


def cmd_rank(args):
    summary, _ = _summary(args)
    report = friedman_nemenyi(summary.matrix, args.alpha)
    with _out(args.out) as fh:
        fh.write("solver,average_rank\n")
        for solver, rank in sorted(report.average_ranks.items(), key=lambda kv: (kv[1], kv[0])):
            fh.write(f"{solver},{rank:.6f}\n")
        fh.write(f"statistic,{report.statistic:.6f}\np_value,{report.p_value:.6f}\n"
                 f"critical_distance,{report.critical_distance:.6f}\n")
    if args.svg:
        Path(args.svg).write_text(nemenyi_diagram(report))
    return 0


def cmd_plot(args):
    summary, store = _summary(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    matrix = summary.matrix
    best = {inst: min((c.value for s in matrix.solvers if (c := matrix.cell(s, inst)).feasible), default=None)
            for inst in matrix.instances}
    if store:
        for inst, value in store.best_values().items():
            if inst in best and (best[inst] is None or value < best[inst]):
                best[inst] = value
    usable = [i for i in matrix.instances if best[i] is not None]
    curves = {s: gap_curve({i: matrix.cell(s, i).value for i in usable}, best) for s in matrix.solvers}
    (out / "gap.svg").write_text(gap_plot(curves, x_limit=args.x_limit))
    if len(matrix.solvers) >= 2 and len(matrix.instances) >= 2:
        (out / "nemenyi.svg").write_text(nemenyi_diagram(friedman_nemenyi(matrix)))
    for inst in args.instance or []:
        traces = {s: summary.traces.get((s, inst), []) for s in matrix.solvers}
        safe = inst.replace("/", "_")
        (out / f"progress_{safe}.svg").write_text(progress_plot(traces, title=f"Progress on {inst}"))
        if args.threshold is not None:
            (out / f"progress_{safe}_threshold.svg").write_text(
                progress_plot(traces, reference=best.get(inst), threshold=args.threshold, log_y=True,
                              title=f"Progress on {inst} (target {args.threshold:g})"))
    return 0


def cmd_export(args):
    inst = read_instance(args.input, lenient=args.lenient)
    text = export_milp_text(inst) if args.milp else export_cp_text(inst)
    with _out(args.out) as fh:
        fh.write(text)
    return 0


def cmd_best_known(args):
    store = BestKnownStore.load(args.store)
    if args.records:
        store = update_best_known(store, read_records(args.records))
        store.save(args.store)
    with _out(None) as fh:
        fh.write("id,best,lower_bound,provenance\n")
        for ident in sorted(store.entries):
            e = store.entries[ident]
            fh.write(f"{ident},{'' if e.best is None else e.best},"
                     f"{'' if e.lower_bound is None else e.lower_bound},{e.provenance}\n")
    return 0


def cmd_summary(args):
    summary, _ = _summary(args)
    with _out(args.out) as fh:
        write_summary_csv(summary, fh)
    return 0


def build_parser() -> argparse.ArgumentParser:
    default_out = os.environ.get("FJSSPW_OUTPUT_DIR", "results")
    default_jobs = int(os.environ.get("FJSSPW_JOBS", "1"))

    parser = argparse.ArgumentParser(prog="fjsspw-bench", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def instances_args(p, filtering=True):
        p.add_argument("inputs", nargs="*", help="instance files")
        p.add_argument("--catalog", help="directory of instance files grouped by source")
        p.add_argument("--lenient", action="store_true")
        p.add_argument("--jobs", type=int, default=default_jobs)
        if filtering:
            p.add_argument("--bound", type=_bound, action="append", help="name:lo:hi, repeatable")
            p.add_argument("--source", action="append", help="source whitelist, repeatable")

    def ga_args(p):
        p.add_argument("--ga-pop", type=int)
        p.add_argument("--ga-tournament", type=int)
        p.add_argument("--ga-elitism", type=int)
        p.add_argument("--ga-crossover", type=float)
        p.add_argument("--ga-mutation", type=float)
        p.add_argument("--ga-budget", type=int, help="maximum fitness evaluations")

    p = sub.add_parser("stats", help="instance characteristics as CSV")
    instances_args(p, filtering=False)
    p.add_argument("--out")
    p.add_argument("--strict", action="store_true", help="exit 1 if any file failed to parse")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("filter", help="print ids matching characteristic bounds")
    instances_args(p)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("extend", help="add worker flexibility to an FJSSP instance")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--workers", type=int)
    p.add_argument("--lb", type=float, default=0.9)
    p.add_argument("--ub", type=float, default=1.1)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("solve", help="run one solver on one instance")
    p.add_argument("--solver", choices=["greedy", "ga"], required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--time-limit", type=float, default=1200.0)
    p.add_argument("--earliest-finish", action="store_true")
    p.add_argument("--deterministic-time", action="store_true")
    p.add_argument("--lenient", action="store_true")
    p.add_argument("--out")
    p.add_argument("--schedule", help="write the decoded schedule as JSON")
    p.add_argument("--gantt", help="write an SVG Gantt chart")
    ga_args(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("run", help="run an experiment plan")
    instances_args(p)
    p.add_argument("--solvers", default="greedy,ga")
    p.add_argument("--repetitions", type=int, default=20)
    p.add_argument("--seed", type=int, default=0, help="base seed")
    p.add_argument("--time-limit", type=float, default=1200.0)
    p.add_argument("--out-dir", default=default_out)
    p.add_argument("--resume", action="store_true")
    p.add_argument("--deterministic-time", action="store_true")
    ga_args(p)
    p.set_defaults(func=cmd_run)

    for name, func, helptext in (("score", cmd_score, "MiniZinc scores"), ("rank", cmd_rank, "Friedman/Nemenyi"),
                                 ("summary", cmd_summary, "per solver/instance aggregates")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--records", required=True)
        p.add_argument("--best-known")
        p.add_argument("--out")
        if name == "score":
            p.add_argument("--both-infeasible-zero", action="store_true")
        if name == "rank":
            p.add_argument("--alpha", type=float, default=0.05)
            p.add_argument("--svg")
        p.set_defaults(func=func)

    p = sub.add_parser("plot", help="gap, Nemenyi and progress plots as SVG")
    p.add_argument("--records", required=True)
    p.add_argument("--best-known")
    p.add_argument("--out-dir", default=default_out)
    p.add_argument("--x-limit", type=float)
    p.add_argument("--instance", action="append", help="instance id for progress plots")
    p.add_argument("--threshold", type=float)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("export", help="write the MILP (LP format) or CP (JSON) model")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--milp", action="store_true")
    group.add_argument("--cp", action="store_true")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.add_argument("--lenient", action="store_true")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("best-known", help="show or update the best-known store")
    p.add_argument("--store", required=True)
    p.add_argument("--records")
    p.set_defaults(func=cmd_best_known)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
