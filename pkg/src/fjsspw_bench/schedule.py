"""Solution encoding, schedule decoding, lower bounds and an exact enumerator.

An encoding is three vectors over the ``N`` operations:

* ``s``  job indices; the j-th occurrence of job i stands for operation O_ij,
* ``a``  machine per operation in the fixed order (job 1 op 1 ... job n op n_n),
* ``wv`` worker per operation in the same order (``None`` for plain FJSSP).

Decoding inserts operations in ``s`` order at the earliest time allowed by the
job predecessor, the machine and the worker (semi-active schedule).
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .model import Instance


class InvalidEncodingError(ValueError):
    def __init__(self, violations):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


class SearchLimitError(ValueError):
    """Raised when exhaustive search is asked to handle too many operations."""


@dataclass(frozen=True)
class Encoding:
    s: tuple[int, ...]
    a: tuple[int, ...]
    wv: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "s", tuple(self.s))
        object.__setattr__(self, "a", tuple(self.a))
        if self.wv is not None:
            object.__setattr__(self, "wv", tuple(self.wv))

    def key(self) -> tuple:
        return (self.s, self.a, self.wv or ())

    def to_dict(self) -> dict:
        return {"s": list(self.s), "a": list(self.a), "wv": None if self.wv is None else list(self.wv)}

    @classmethod
    def from_dict(cls, data: dict) -> "Encoding":
        return cls(data["s"], data["a"], data.get("wv"))


@dataclass(frozen=True)
class Violation:
    position: int  # 0-based index into the offending vector
    reason: str

    def __str__(self) -> str:
        return f"position {self.position}: {self.reason}"


@dataclass
class Schedule:
    start: list[int]
    end: list[int]
    machine: list[int]
    worker: list[Optional[int]]
    makespan: int
    job: list[int] = field(default_factory=list)
    op: list[int] = field(default_factory=list)

    def machine_timelines(self) -> dict[int, list[tuple[int, int, int]]]:
        """machine -> sorted [(start, end, flat op index)]."""
        lines: dict[int, list] = {}
        for p, k in enumerate(self.machine):
            lines.setdefault(k, []).append((self.start[p], self.end[p], p))
        return {k: sorted(v) for k, v in sorted(lines.items())}

    def worker_timelines(self) -> dict[int, list[tuple[int, int, int]]]:
        lines: dict[int, list] = {}
        for p, s in enumerate(self.worker):
            if s is not None:
                lines.setdefault(s, []).append((self.start[p], self.end[p], p))
        return {s: sorted(v) for s, v in sorted(lines.items())}

    def to_dict(self) -> dict:
        ops = []
        for p in range(len(self.start)):
            ops.append({"job": self.job[p], "op": self.op[p], "machine": self.machine[p],
                        "worker": self.worker[p], "start": self.start[p], "end": self.end[p]})
        return {"makespan": self.makespan, "operations": ops}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def precedes(y: Schedule, z: Schedule) -> bool:
    """Strict order on schedules: ``y`` is better than ``z`` iff its makespan is smaller."""
    return y.makespan < z.makespan


def validate_encoding(instance: Instance, enc: Encoding) -> list[Violation]:
    violations = []
    N = instance.num_operations
    counts = Counter(enc.s)
    if len(enc.s) != N:
        violations.append(Violation(len(enc.s), f"sequence length {len(enc.s)} != {N}"))
    for pos, job in enumerate(enc.s):
        if not 1 <= job <= instance.n:
            violations.append(Violation(pos, f"job index {job} outside [1, {instance.n}]"))
    for i, size in enumerate(instance.job_sizes, start=1):
        if counts.get(i, 0) != size:
            violations.append(Violation(0, f"job {i} appears {counts.get(i, 0)} times, expected {size}"))
    if len(enc.a) != N:
        violations.append(Violation(len(enc.a), f"assignment length {len(enc.a)} != {N}"))
    if instance.has_workers:
        if enc.wv is None or len(enc.wv) != N:
            got = None if enc.wv is None else len(enc.wv)
            violations.append(Violation(0, f"worker vector length {got} != {N}"))
    elif enc.wv is not None:
        violations.append(Violation(0, "worker vector given for a plain FJSSP instance"))
    for p in range(min(N, len(enc.a))):
        admissible = instance.mode_durations[p]
        machines = {k for k, _ in admissible}
        if enc.a[p] not in machines:
            violations.append(Violation(p, f"machine {enc.a[p]} not admissible for operation {p}"))
        elif instance.has_workers and enc.wv is not None and p < len(enc.wv):
            if (enc.a[p], enc.wv[p]) not in admissible:
                violations.append(Violation(p, f"worker {enc.wv[p]} not admissible on machine {enc.a[p]}"))
    return violations


def decode_schedule(instance: Instance, enc: Encoding, check: bool = True) -> Schedule:
    if check:
        violations = validate_encoding(instance, enc)
        if violations:
            raise InvalidEncodingError(violations)
    N = instance.num_operations
    start = [0] * N
    end = [0] * N
    machine = list(enc.a)
    worker = list(enc.wv) if enc.wv is not None else [None] * N
    next_op = [0] * instance.n
    job_ready = [0] * instance.n
    machine_free: dict[int, int] = {}
    worker_free: dict[int, int] = {}
    offsets = instance.op_offsets
    durations = instance.mode_durations
    for job in enc.s:
        i = job - 1
        p = offsets[i] + next_op[i]
        next_op[i] += 1
        k = machine[p]
        s = worker[p]
        t = max(job_ready[i], machine_free.get(k, 0))
        if s is not None:
            t = max(t, worker_free.get(s, 0))
        e = t + durations[p][(k, s)]
        start[p] = t
        end[p] = e
        job_ready[i] = e
        machine_free[k] = e
        if s is not None:
            worker_free[s] = e
    ops = [j + 1 for size in instance.job_sizes for j in range(size)]
    return Schedule(start, end, machine, worker, max(end), list(instance.op_job), ops)


def makespan(instance: Instance, enc: Encoding) -> int:
    """Makespan without validation or bookkeeping; for inner search loops."""
    next_op = [0] * instance.n
    job_ready = [0] * instance.n
    machine_free: dict = {}
    worker_free: dict = {}
    offsets = instance.op_offsets
    durations = instance.mode_durations
    a = enc.a
    wv = enc.wv
    best = 0
    for job in enc.s:
        i = job - 1
        p = offsets[i] + next_op[i]
        next_op[i] += 1
        k = a[p]
        t = job_ready[i]
        mf = machine_free.get(k, 0)
        if mf > t:
            t = mf
        if wv is not None:
            s = wv[p]
            wf = worker_free.get(s, 0)
            if wf > t:
                t = wf
            e = t + durations[p][(k, s)]
            worker_free[s] = e
        else:
            e = t + durations[p][(k, None)]
        job_ready[i] = e
        machine_free[k] = e
        if e > best:
            best = e
    return best


def schedule_conflicts(instance: Instance, sched: Schedule) -> list[str]:
    """Overlaps and precedence breaches in a decoded schedule (empty if sound)."""
    problems = []
    for label, lines in (("machine", sched.machine_timelines()), ("worker", sched.worker_timelines())):
        for res, spans in lines.items():
            for (s0, e0, p0), (s1, e1, p1) in zip(spans, spans[1:]):
                if s1 < e0:
                    problems.append(f"{label} {res}: operations {p0} and {p1} overlap")
    for i, size in enumerate(instance.job_sizes):
        base = instance.op_offsets[i]
        for j in range(1, size):
            if sched.start[base + j] < sched.end[base + j - 1]:
                problems.append(f"job {i + 1}: operation {j + 1} starts before its predecessor ends")
    for p in range(instance.num_operations):
        d = instance.mode_durations[p][(sched.machine[p], sched.worker[p])]
        if sched.end[p] != sched.start[p] + d:
            problems.append(f"operation {p}: end != start + duration")
    if sched.makespan != max(sched.end):
        problems.append("makespan != max end time")
    return problems


def lower_bound(instance: Instance) -> int:
    """max(longest job chain of minimum durations, machine load, worker load)."""
    mins = [op.min_duration for op in instance.operations]
    chain = 0
    for i, size in enumerate(instance.job_sizes):
        base = instance.op_offsets[i]
        chain = max(chain, sum(mins[base:base + size]))
    total = sum(mins)
    bound = max(chain, math.ceil(total / instance.m))
    if instance.has_workers:
        bound = max(bound, math.ceil(total / instance.w))
    return bound


def brute_force_solve(instance: Instance, cap: int = 8) -> tuple[int, Encoding]:
    """Exact minimum makespan over every valid encoding.

    Depth-first enumeration over sequence positions; at each step the next job
    (ascending) and then its (machine, worker) mode (ascending) are chosen.
    Branches whose job-chain bound exceeds the incumbent are cut. Among optimal
    encodings the lexicographically smallest ``(s, a, wv)`` is returned.
    """
    N = instance.num_operations
    if N > cap:
        raise SearchLimitError(f"instance has {N} operations; exhaustive search is capped at {cap}")
    n = instance.n
    offsets = instance.op_offsets
    sizes = instance.job_sizes
    modes = [sorted((k, s if s is not None else 0, d) for k, s, d in m) for m in instance.op_modes]
    mins = [min(d for _, _, d in m) for m in modes]
    # remaining[p]: min duration of operation p and its job successors
    remaining = [0] * (N + 1)
    for i in range(n):
        acc = 0
        for j in range(sizes[i] - 1, -1, -1):
            acc += mins[offsets[i] + j]
            remaining[offsets[i] + j] = acc
    with_workers = instance.has_workers

    best = [math.inf, None]  # value, key
    s_vec: list[int] = []
    a_vec = [0] * N
    w_vec = [0] * N
    next_op = [0] * n
    job_ready = [0] * n
    machine_free: dict = {}
    worker_free: dict = {}

    def bound() -> int:
        lb = 0
        for i in range(n):
            if next_op[i] < sizes[i]:
                lb = max(lb, job_ready[i] + remaining[offsets[i] + next_op[i]])
            else:
                lb = max(lb, job_ready[i])
        return lb

    def dfs(depth: int, span: int):
        if depth == N:
            key = (tuple(s_vec), tuple(a_vec), tuple(w_vec) if with_workers else ())
            if span < best[0] or (span == best[0] and key < best[1]):
                best[0], best[1] = span, key
            return
        for i in range(n):
            if next_op[i] >= sizes[i]:
                continue
            p = offsets[i] + next_op[i]
            for k, s, d in modes[p]:
                t = max(job_ready[i], machine_free.get(k, 0))
                if with_workers:
                    t = max(t, worker_free.get(s, 0))
                e = t + d
                saved = (job_ready[i], machine_free.get(k), worker_free.get(s))
                next_op[i] += 1
                job_ready[i] = e
                machine_free[k] = e
                if with_workers:
                    worker_free[s] = e
                s_vec.append(i + 1)
                a_vec[p] = k
                w_vec[p] = s
                new_span = max(span, e)
                lb = max(new_span, bound())
                if lb < best[0] or (lb == best[0] and _prefix_may_tie(s_vec, best[1])):
                    dfs(depth + 1, new_span)
                s_vec.pop()
                next_op[i] -= 1
                job_ready[i] = saved[0]
                _restore(machine_free, k, saved[1])
                if with_workers:
                    _restore(worker_free, s, saved[2])

    dfs(0, 0)
    s, a, wv = best[1]
    enc = Encoding(s, a, wv if with_workers else None)
    return int(best[0]), enc


def _prefix_may_tie(s_vec: list[int], best_key) -> bool:
    # Later prefixes are lexicographically larger unless they equal the incumbent's prefix.
    return best_key is not None and tuple(s_vec) == best_key[0][:len(s_vec)]


def _restore(table: dict, key, value):
    if value is None:
        table.pop(key, None)
    else:
        table[key] = value


def random_encoding(instance: Instance, rng) -> Encoding:
    """Uniformly shuffled sequence and uniformly drawn (machine, worker) modes.

    ``rng`` needs ``shuffle`` and ``choice`` (``random.Random`` or ``SplitMix64``).
    """
    s = [i + 1 for i, size in enumerate(instance.job_sizes) for _ in range(size)]
    rng.shuffle(s)
    a, wv = [], []
    for modes in instance.op_modes:
        k, w, _ = rng.choice(modes)
        a.append(k)
        wv.append(w)
    return Encoding(s, a, wv if instance.has_workers else None)
