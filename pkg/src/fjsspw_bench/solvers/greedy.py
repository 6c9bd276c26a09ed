"""Greedy constructor: repeatedly schedule the fastest frontier operation."""

from __future__ import annotations

from typing import Callable, Optional

from ..model import Instance
from ..rng import SplitMix64
from ..schedule import Encoding, makespan
from .base import MonotonicClock, SolveRun


def greedy_encoding(instance: Instance, rng: SplitMix64, earliest_finish: bool = False) -> Encoding:
    """Build an encoding from the frontier of next operations of every job.

    By default the (operation, machine, worker) choice with the smallest
    processing time wins. With ``earliest_finish`` the choice with the
    earliest completion time given the partial schedule wins. Ties are broken
    uniformly at random.
    """
    n = instance.n
    N = instance.num_operations
    sizes = instance.job_sizes
    offsets = instance.op_offsets
    next_op = [0] * n
    job_ready = [0] * n
    machine_free: dict = {}
    worker_free: dict = {}
    s: list[int] = []
    a = [0] * N
    wv = [0] * N
    for _ in range(N):
        best_key = None
        candidates = []
        for i in range(n):
            if next_op[i] >= sizes[i]:
                continue
            p = offsets[i] + next_op[i]
            for k, w, d in instance.op_modes[p]:
                if earliest_finish:
                    t = max(job_ready[i], machine_free.get(k, 0), worker_free.get(w, 0) if w is not None else 0)
                    key = t + d
                else:
                    key = d
                if best_key is None or key < best_key:
                    best_key, candidates = key, [(i, p, k, w, d)]
                elif key == best_key:
                    candidates.append((i, p, k, w, d))
        i, p, k, w, d = candidates[rng.randbelow(len(candidates))] if len(candidates) > 1 else candidates[0]
        t = max(job_ready[i], machine_free.get(k, 0))
        if w is not None:
            t = max(t, worker_free.get(w, 0))
            worker_free[w] = t + d
        machine_free[k] = t + d
        job_ready[i] = t + d
        next_op[i] += 1
        s.append(i + 1)
        a[p] = k
        wv[p] = w
    return Encoding(s, a, wv if instance.has_workers else None)


def greedy_solve(instance: Instance, seed: Optional[int] = None, earliest_finish: bool = False,
                 clock: Optional[Callable[[], float]] = None) -> SolveRun:
    clock = clock or MonotonicClock()
    rng = SplitMix64(seed if seed is not None else 0)
    enc = greedy_encoding(instance, rng, earliest_finish)
    value = makespan(instance, enc)
    run = SolveRun("greedy-ef" if earliest_finish else "greedy", instance.id, seed, enc, value, True,
                   evaluations=1)
    run.record(clock(), value)
    run.wallclock = run.trace[-1][0]
    return run
