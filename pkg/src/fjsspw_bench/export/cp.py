"""Interval-variable CP model as a versioned JSON document.

The layout is described by ``cp_model.schema.json`` next to this module.
"""

from __future__ import annotations

import json
from importlib import resources

from ..model import Instance
from ..schedule import Schedule

SCHEMA_NAME = "fjsspw-cp-model"
SCHEMA_VERSION = 1


def _interval(i: int, j: int) -> str:
    return f"I_{i}_{j}"


def _alternative(i: int, j: int, k: int, s) -> str:
    return f"A_{i}_{j}_{k}" + (f"_{s}" if s is not None else "")


def export_cp(instance: Instance) -> dict:
    workers = instance.has_workers
    intervals, alternatives, precedences = [], [], []
    machine_groups: dict[int, list[str]] = {}
    worker_groups: dict[int, list[str]] = {}
    for p, modes in enumerate(instance.op_modes):
        i = instance.op_job[p]
        j = p - instance.op_offsets[i - 1] + 1
        names = []
        for k, s, d in sorted(modes, key=lambda x: (x[0], x[1] or 0)):
            name = _alternative(i, j, k, s)
            names.append(name)
            alternatives.append({"name": name, "interval": _interval(i, j), "machine": k, "worker": s,
                                 "duration": d})
            machine_groups.setdefault(k, []).append(name)
            if s is not None:
                worker_groups.setdefault(s, []).append(name)
        intervals.append({"name": _interval(i, j), "job": i, "operation": j, "alternatives": names})
        if j > 1:
            precedences.append({"type": "end_before_start", "before": _interval(i, j - 1), "after": _interval(i, j)})
    no_overlap = [{"resource": "machine", "id": k, "alternatives": names} for k, names in sorted(machine_groups.items())]
    no_overlap += [{"resource": "worker", "id": s, "alternatives": names} for s, names in sorted(worker_groups.items())]
    last = [_interval(i, size) for i, size in enumerate(instance.job_sizes, start=1)]
    return {
        "schema": SCHEMA_NAME,
        "version": SCHEMA_VERSION,
        "instance": instance.id,
        "variant": "fjssp-w" if workers else "fjssp",
        "jobs": instance.n,
        "machines": instance.m,
        "workers": instance.w,
        "intervals": intervals,
        "alternatives": alternatives,
        "precedences": precedences,
        "no_overlap": no_overlap,
        "objective": {"sense": "minimize", "expression": "max_end", "intervals": last},
    }


def export_cp_text(instance: Instance) -> str:
    return json.dumps(export_cp(instance), indent=1) + "\n"


def load_schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("cp_model.schema.json").read_text())


def check_cp_schedule(doc: dict, schedule: Schedule) -> list[str]:
    """Constraint breaches when ``schedule`` is substituted into the CP document."""
    chosen = {}
    for p in range(len(schedule.start)):
        name = _alternative(schedule.job[p], schedule.op[p], schedule.machine[p], schedule.worker[p])
        chosen[name] = (schedule.start[p], schedule.end[p])
    problems = []
    durations = {alt["name"]: alt["duration"] for alt in doc["alternatives"]}
    spans = {}
    for iv in doc["intervals"]:
        present = [a for a in iv["alternatives"] if a in chosen]
        if len(present) != 1:
            problems.append(f"{iv['name']}: {len(present)} alternatives present")
            continue
        start, end = chosen[present[0]]
        if end - start != durations[present[0]]:
            problems.append(f"{present[0]}: wrong duration")
        spans[iv["name"]] = (start, end)
    for prec in doc["precedences"]:
        if prec["before"] in spans and prec["after"] in spans and spans[prec["before"]][1] > spans[prec["after"]][0]:
            problems.append(f"{prec['before']} ends after {prec['after']} starts")
    for group in doc["no_overlap"]:
        used = sorted(chosen[a] for a in group["alternatives"] if a in chosen)
        for (s0, e0), (s1, e1) in zip(used, used[1:]):
            if s1 < e0:
                problems.append(f"{group['resource']} {group['id']}: overlap")
    makespan = max((spans[n][1] for n in doc["objective"]["intervals"] if n in spans), default=0)
    if makespan != schedule.makespan:
        problems.append("objective differs from schedule makespan")
    return problems
