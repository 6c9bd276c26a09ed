"""Experiment orchestration: run plans, JSON-lines run records, aggregation, best-known store."""

from __future__ import annotations

import csv
import json
import logging
import os
import platform
import statistics
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional

from . import __version__
from .analysis.results import Cell, ResultMatrix
from .model import Instance
from .schedule import lower_bound
from .solvers import GaConfig, MonotonicClock, SolveRun, VirtualClock, ga_solve, greedy_solve

log = logging.getLogger(__name__)

RECORDS_FILE = "runs.jsonl"


class PlanError(ValueError):
    pass


class IntegrityError(ValueError):
    pass


# ---------------------------------------------------------------- solver registry

def _run_greedy(instance: Instance, seed: int, time_limit: float, options: dict, clock) -> SolveRun:
    return greedy_solve(instance, seed, earliest_finish=bool(options.get("earliest_finish")), clock=clock)


def _run_ga(instance: Instance, seed: int, time_limit: float, options: dict, clock) -> SolveRun:
    config = GaConfig(time_limit=time_limit, **options)
    return ga_solve(instance, config, seed, clock=clock)


SOLVERS = {"greedy": _run_greedy, "ga": _run_ga}


def solve(solver: str, instance: Instance, seed: int, time_limit: float, options: Optional[dict] = None,
          deterministic_time: bool = False) -> SolveRun:
    if solver not in SOLVERS:
        raise PlanError(f"unknown solver {solver!r}; known: {sorted(SOLVERS)}")
    clock = VirtualClock() if deterministic_time else MonotonicClock()
    run = SOLVERS[solver](instance, seed, time_limit, dict(options or {}), clock)
    run.solver = solver
    return run


def host_descriptor() -> str:
    return f"{platform.platform()}; {platform.machine()}; {platform.processor() or 'unknown cpu'}; " \
           f"{os.cpu_count()} logical cpus; python {platform.python_version()}"


# ---------------------------------------------------------------- plans

@dataclass
class ExperimentPlan:
    instance_ids: list[str]
    solvers: dict[str, dict]  # solver name -> solver options
    repetitions: int = 20
    base_seed: int = 0
    time_limit: float = 1200.0
    output_dir: str = "results"
    jobs: int = 1
    deterministic_time: bool = False

    def __post_init__(self):
        if self.repetitions < 1:
            raise PlanError("repetitions must be >= 1")
        if self.jobs < 1:
            raise PlanError("jobs must be >= 1")

    def runs(self) -> list[tuple[int, str, str, int, int]]:
        """(run index, instance id, solver, repetition, seed); seed = base_seed + run index."""
        out = []
        for inst in self.instance_ids:
            for solver in self.solvers:
                for rep in range(self.repetitions):
                    idx = len(out)
                    out.append((idx, inst, solver, rep, self.base_seed + idx))
        return out

    def validate(self, instances: Mapping[str, Instance]) -> None:
        unknown_solvers = [s for s in self.solvers if s not in SOLVERS]
        if unknown_solvers:
            raise PlanError(f"unknown solvers {unknown_solvers}; known: {sorted(SOLVERS)}")
        missing = [i for i in self.instance_ids if i not in instances]
        if missing:
            raise PlanError(f"unknown instance ids {missing}")

    @property
    def records_path(self) -> Path:
        return Path(self.output_dir) / RECORDS_FILE


def run_key(instance_id: str, solver: str, repetition: int) -> str:
    return f"{instance_id}|{solver}|{repetition}"


def _execute(args) -> dict:
    index, inst_id, solver, rep, seed, instance, time_limit, options, det = args
    record = {"key": run_key(inst_id, solver, rep), "index": index, "instance": inst_id, "solver": solver,
              "repetition": rep, "seed": seed}
    try:
        run = solve(solver, instance, seed, time_limit, options, det)
        record.update(status="ok", run=run.to_dict())
    except Exception as exc:  # a crashed run becomes a failure record
        record.update(status="failed", error=f"{type(exc).__name__}: {exc}", run=None)
    return record


def read_records(path) -> list[dict]:
    path = Path(path)
    if not path.exists():
        return []
    records = []
    with path.open() as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError:
                log.warning("%s:%d: skipping truncated record", path, line_no)
    return records


def run_experiment(plan: ExperimentPlan, instances: Mapping[str, Instance], resume: bool = False,
                   max_runs: Optional[int] = None) -> list[dict]:
    """Execute the plan and append one JSON line per run to ``<output_dir>/runs.jsonl``.

    With ``resume`` runs whose key already has a record are skipped.
    ``max_runs`` stops after that many new runs (used to simulate interruption).
    Returns the records written by this call.
    """
    plan.validate(instances)
    out_dir = Path(plan.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = plan.records_path
    done = set()
    if path.exists():
        if not resume:
            raise FileExistsError(f"{path} exists; pass resume=True to continue it")
        done = {r["key"] for r in read_records(path)}
    env = {"toolkit_version": __version__, "host": host_descriptor()}
    todo = [(idx, inst, solver, rep, seed, instances[inst], plan.time_limit, plan.solvers[solver],
             plan.deterministic_time)
            for idx, inst, solver, rep, seed in plan.runs() if run_key(inst, solver, rep) not in done]
    if max_runs is not None:
        todo = todo[:max_runs]
    written = []
    with path.open("a") as fh:
        def append(record):
            record["env"] = env
            fh.write(json.dumps(record, sort_keys=True) + "\n")
            fh.flush()
            written.append(record)

        if plan.jobs == 1:
            for args in todo:
                append(_execute(args))
        else:
            with ProcessPoolExecutor(plan.jobs) as pool:
                for fut in as_completed([pool.submit(_execute, args) for args in todo]):
                    append(fut.result())
    return written


# ---------------------------------------------------------------- aggregation

@dataclass
class Aggregate:
    runs: int
    feasible_runs: int
    best: Optional[int]
    mean: Optional[float]
    std: Optional[float]
    time_to_best: float = 0.0


@dataclass
class Summary:
    matrix: ResultMatrix
    aggregates: dict = field(default_factory=dict)  # (solver, instance) -> Aggregate
    traces: dict = field(default_factory=dict)  # (solver, instance) -> trace of the best repetition


def summarize(records: Iterable[dict], store: Optional["BestKnownStore"] = None,
              instances: Optional[Iterable[str]] = None) -> Summary:
    """Fold run records into per (solver, instance) aggregates and a result matrix.

    Records for instances outside ``instances`` (or, if not given, outside a
    non-empty ``store``) are skipped with a warning.
    """
    known = set(instances) if instances is not None else (set(store.entries) if store and store.entries else None)
    grouped: dict[tuple[str, str], list[Optional[SolveRun]]] = {}
    solvers: list[str] = []
    inst_order: list[str] = []
    for rec in records:
        inst = rec["instance"]
        if known is not None and inst not in known:
            log.warning("skipping record %s for unknown instance %s", rec.get("key"), inst)
            continue
        solver = rec["solver"]
        if solver not in solvers:
            solvers.append(solver)
        if inst not in inst_order:
            inst_order.append(inst)
        run = SolveRun.from_dict(rec["run"]) if rec.get("status") == "ok" and rec.get("run") else None
        grouped.setdefault((solver, inst), []).append(run)
    matrix = ResultMatrix(sorted(solvers), sorted(inst_order))
    summary = Summary(matrix)
    for (solver, inst), runs in sorted(grouped.items()):
        feasible = [r for r in runs if r is not None and r.feasible and r.best_makespan is not None]
        values = [r.best_makespan for r in feasible]
        if feasible:
            best_run = min(feasible, key=lambda r: (r.best_makespan, r.time_to_best))
            std = statistics.stdev(values) if len(values) > 1 else 0.0
            agg = Aggregate(len(runs), len(feasible), best_run.best_makespan, statistics.fmean(values), std,
                            best_run.time_to_best)
            matrix.cells[(solver, inst)] = Cell(best_run.best_makespan, best_run.time_to_best)
            summary.traces[(solver, inst)] = list(best_run.trace)
        else:
            agg = Aggregate(len(runs), 0, None, None, None)
        summary.aggregates[(solver, inst)] = agg
    return summary


def write_summary_csv(summary: Summary, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["solver", "instance", "runs", "feasible_runs", "best", "mean", "std", "time_to_best"])
    for (solver, inst), agg in sorted(summary.aggregates.items()):
        writer.writerow([solver, inst, agg.runs, agg.feasible_runs, "" if agg.best is None else agg.best,
                         "" if agg.mean is None else f"{agg.mean:.6f}", "" if agg.std is None else f"{agg.std:.6f}",
                         f"{agg.time_to_best:.6f}"])


# ---------------------------------------------------------------- best-known store

@dataclass
class BestKnownEntry:
    best: Optional[int] = None
    lower_bound: Optional[int] = None
    provenance: str = ""

    def __post_init__(self):
        if self.best is not None and self.lower_bound is not None and self.lower_bound > self.best:
            raise IntegrityError(f"lower bound {self.lower_bound} exceeds best {self.best}")


@dataclass
class BestKnownStore:
    entries: dict[str, BestKnownEntry] = field(default_factory=dict)

    COLUMNS = ("id", "best", "lower_bound", "provenance")

    def best(self, ident: str) -> Optional[int]:
        entry = self.entries.get(ident)
        return entry.best if entry else None

    def best_values(self) -> dict[str, int]:
        return {k: e.best for k, e in self.entries.items() if e.best is not None}

    def copy(self) -> "BestKnownStore":
        return BestKnownStore({k: BestKnownEntry(e.best, e.lower_bound, e.provenance) for k, e in self.entries.items()})

    @classmethod
    def load(cls, path) -> "BestKnownStore":
        store = cls()
        path = Path(path)
        if not path.exists():
            return store
        with path.open(newline="") as fh:
            for row in csv.DictReader(fh):
                store.entries[row["id"]] = BestKnownEntry(
                    int(row["best"]) if row.get("best") else None,
                    int(row["lower_bound"]) if row.get("lower_bound") else None,
                    row.get("provenance", "") or "",
                )
        return store

    def save(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(self.COLUMNS)
            for ident in sorted(self.entries):
                e = self.entries[ident]
                writer.writerow([ident, "" if e.best is None else e.best,
                                 "" if e.lower_bound is None else e.lower_bound, e.provenance])

    def seed_lower_bounds(self, instances: Mapping[str, Instance]) -> None:
        """Fill missing lower bounds with the toolkit's combinatorial bound."""
        for ident, inst in instances.items():
            entry = self.entries.setdefault(ident, BestKnownEntry())
            if entry.lower_bound is None:
                entry.lower_bound = lower_bound(inst)


def update_best_known(store: BestKnownStore, records: Iterable[dict]) -> BestKnownStore:
    """Return a copy of ``store`` improved by strictly smaller feasible makespans in ``records``.

    Raises IntegrityError when a candidate undercuts the stored lower bound.
    """
    new = store.copy()
    for rec in records:
        run = rec.get("run")
        if rec.get("status") != "ok" or not run or not run.get("feasible") or run.get("best_makespan") is None:
            continue
        value = int(run["best_makespan"])
        ident = rec["instance"]
        entry = new.entries.setdefault(ident, BestKnownEntry())
        if entry.lower_bound is not None and value < entry.lower_bound:
            raise IntegrityError(f"{ident}: candidate {value} is below the lower bound {entry.lower_bound}")
        if entry.best is None or value < entry.best:
            log.info("%s: best-known %s -> %d (%s)", ident, entry.best, value, rec.get("solver"))
            entry.best = value
            entry.provenance = f"{rec.get('solver')} seed={rec.get('seed')}"
    return new
