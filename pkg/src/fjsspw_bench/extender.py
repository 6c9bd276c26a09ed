"""Turn an FJSSP instance into an FJSSP-W instance by sampling worker options."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

from . import __version__
from .model import Instance, Job, MachineOption, Operation, WorkerInstance, WorkerOption, WrongVariantError
from .rng import SplitMix64


def round_half_up(x: float) -> int:
    """Round to the closest integer, halves away from zero."""
    return int(math.floor(abs(x) + 0.5)) * (1 if x >= 0 else -1)


@dataclass(frozen=True)
class ExtendParams:
    workers: Optional[int] = None  # None: round_half_up(1.5 * m)
    lb: float = 0.9
    ub: float = 1.1
    seed: Optional[int] = None

    def __post_init__(self):
        if self.workers is not None and self.workers < 1:
            raise ValueError(f"worker count must be >= 1, got {self.workers}")
        if not 0 < self.lb <= self.ub:
            raise ValueError(f"need 0 < lb <= ub, got lb={self.lb}, ub={self.ub}")

    def worker_count(self, m: int) -> int:
        return self.workers if self.workers is not None else max(1, round_half_up(1.5 * m))


def extend_instance(instance: Instance, params: ExtendParams = ExtendParams()) -> WorkerInstance:
    """Sample a worker layer for every (operation, machine) option.

    For each option, in file order: the number of workers is uniform on
    ``[1, w]``; that many distinct worker ids are drawn without replacement;
    each worker's duration is ``round(U(d*lb, d*ub))``, clamped to at least 1.
    """
    if instance.has_workers:
        raise WrongVariantError("instance already has worker flexibility")
    w = params.worker_count(instance.m)
    rng = SplitMix64(params.seed)
    jobs = []
    for job in instance.jobs:
        ops = []
        for op in job.operations:
            options = []
            for mo in op.machine_options:
                count = rng.randint(1, w)
                selected = rng.sample(range(w), count)
                workers = []
                for worker in selected:
                    d = round_half_up(rng.uniform(mo.duration * params.lb, mo.duration * params.ub))
                    workers.append(WorkerOption(worker + 1, max(1, d)))
                options.append(MachineOption(mo.machine, None, tuple(workers)))
            ops.append(Operation(tuple(options)))
        jobs.append(Job(tuple(ops)))
    return WorkerInstance(tuple(jobs), instance.m, instance.id, w)


def extension_metadata(instance: Instance, params: ExtendParams) -> dict:
    meta = asdict(params)
    meta["workers"] = params.worker_count(instance.m)
    meta["reproducible"] = params.seed is not None
    meta["generator"] = "splitmix64"
    meta["toolkit_version"] = __version__
    meta["source_id"] = instance.id
    return meta
