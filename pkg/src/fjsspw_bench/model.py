"""Domain model for FJSSP and FJSSP-W instances.

Indices for jobs, operations, machines and workers are 1-based in memory.
File formats with other conventions are translated in :mod:`fjsspw_bench.instance_io`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from functools import cached_property
from typing import Iterable, Optional, Sequence


class ModelError(ValueError):
    """Raised when an instance violates a structural invariant."""


class WrongVariantError(ModelError):
    """Raised when an FJSSP routine receives an FJSSP-W instance or vice versa."""


@dataclass(frozen=True)
class WorkerOption:
    worker: int
    duration: int

    def __post_init__(self):
        if self.worker < 1:
            raise ModelError(f"worker index must be >= 1, got {self.worker}")
        if self.duration < 1:
            raise ModelError(f"duration must be >= 1, got {self.duration}")


@dataclass(frozen=True)
class MachineOption:
    """One admissible machine for an operation.

    Plain FJSSP options carry ``duration``; FJSSP-W options carry
    ``worker_options`` instead and leave ``duration`` as ``None``.
    """

    machine: int
    duration: Optional[int] = None
    worker_options: tuple[WorkerOption, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "worker_options", tuple(self.worker_options))
        if self.machine < 1:
            raise ModelError(f"machine index must be >= 1, got {self.machine}")
        if self.worker_options:
            if self.duration is not None:
                raise ModelError("a machine option has either a duration or worker options")
            ids = [wo.worker for wo in self.worker_options]
            if len(set(ids)) != len(ids):
                raise ModelError(f"duplicate worker on machine {self.machine}: {ids}")
        elif self.duration is None or self.duration < 1:
            raise ModelError(f"duration must be >= 1, got {self.duration}")


@dataclass(frozen=True)
class Operation:
    machine_options: tuple[MachineOption, ...]

    def __post_init__(self):
        object.__setattr__(self, "machine_options", tuple(self.machine_options))
        if not self.machine_options:
            raise ModelError("operation without machine options")
        ids = [mo.machine for mo in self.machine_options]
        if len(set(ids)) != len(ids):
            raise ModelError(f"duplicate machine within one operation: {ids}")

    def modes(self) -> list[tuple[int, Optional[int], int]]:
        """All (machine, worker, duration) triples; worker is None for FJSSP."""
        out = []
        for mo in self.machine_options:
            if mo.worker_options:
                out.extend((mo.machine, wo.worker, wo.duration) for wo in mo.worker_options)
            else:
                out.append((mo.machine, None, mo.duration))
        return out

    @property
    def min_duration(self) -> int:
        return min(d for _, _, d in self.modes())

    @property
    def max_duration(self) -> int:
        return max(d for _, _, d in self.modes())


@dataclass(frozen=True)
class Job:
    operations: tuple[Operation, ...]

    def __post_init__(self):
        object.__setattr__(self, "operations", tuple(self.operations))
        if not self.operations:
            raise ModelError("job without operations")


@dataclass(frozen=True)
class Instance:
    """A plain FJSSP instance."""

    jobs: tuple[Job, ...]
    m: int
    id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "jobs", tuple(self.jobs))
        if not self.jobs:
            raise ModelError("instance needs at least one job")
        if self.m < 1:
            raise ModelError(f"machine count must be >= 1, got {self.m}")
        for op in self.operations:
            for mo in op.machine_options:
                if mo.machine > self.m:
                    raise ModelError(f"machine {mo.machine} outside [1, {self.m}]")
        self._check_variant()

    def _check_variant(self):
        for op in self.operations:
            for mo in op.machine_options:
                if mo.worker_options:
                    raise WrongVariantError("plain FJSSP instance carries worker options; use WorkerInstance")

    @property
    def n(self) -> int:
        return len(self.jobs)

    @property
    def w(self) -> int:
        return 0

    @property
    def has_workers(self) -> bool:
        return False

    @cached_property
    def operations(self) -> tuple[Operation, ...]:
        """Operations in the fixed order: job 1 op 1, ..., job n op n_n."""
        return tuple(op for job in self.jobs for op in job.operations)

    @cached_property
    def job_sizes(self) -> tuple[int, ...]:
        return tuple(len(job.operations) for job in self.jobs)

    @cached_property
    def op_offsets(self) -> tuple[int, ...]:
        """Flat index of the first operation of each job (0-based positions)."""
        offs, acc = [], 0
        for size in self.job_sizes:
            offs.append(acc)
            acc += size
        return tuple(offs)

    @cached_property
    def op_job(self) -> tuple[int, ...]:
        """1-based job index for each flat operation position."""
        return tuple(i + 1 for i, size in enumerate(self.job_sizes) for _ in range(size))

    @cached_property
    def op_modes(self) -> tuple[tuple[tuple[int, Optional[int], int], ...], ...]:
        return tuple(tuple(op.modes()) for op in self.operations)

    @cached_property
    def mode_durations(self) -> tuple[dict, ...]:
        """Per flat operation: ``{(machine, worker): duration}``."""
        return tuple({(k, s): d for k, s, d in modes} for modes in self.op_modes)

    @property
    def num_operations(self) -> int:
        return len(self.operations)

    def flat_index(self, job: int, op: int) -> int:
        """Flat position of operation ``op`` (1-based) of ``job`` (1-based)."""
        return self.op_offsets[job - 1] + op - 1

    def with_id(self, new_id: str) -> "Instance":
        return type(self)(**{f.name: getattr(self, f.name) for f in fields(self)} | {"id": new_id})


@dataclass(frozen=True)
class WorkerInstance(Instance):
    """An FJSSP-W instance: every machine option lists admissible workers."""

    workers: int = 1

    def __post_init__(self):
        if self.workers < 1:
            raise ModelError(f"worker count must be >= 1, got {self.workers}")
        super().__post_init__()
        for op in self.operations:
            for mo in op.machine_options:
                for wo in mo.worker_options:
                    if wo.worker > self.workers:
                        raise ModelError(f"worker {wo.worker} outside [1, {self.workers}]")

    def _check_variant(self):
        for op in self.operations:
            for mo in op.machine_options:
                if not mo.worker_options:
                    raise WrongVariantError("every machine option of a WorkerInstance needs worker options")

    @property
    def w(self) -> int:
        return self.workers

    @property
    def has_workers(self) -> bool:
        return True


# ---------------------------------------------------------------- characteristics

CHARACTERISTIC_FIELDS = (
    "n", "m", "w", "N", "ops_per_job", "t_min", "t_max", "duration_span",
    "t_mean", "t_std", "beta", "dv", "omega_avg", "omega_unique",
)


@dataclass(frozen=True)
class Characteristics:
    n: int
    m: int
    w: int
    N: int
    ops_per_job: float
    t_min: int
    t_max: int
    duration_span: int
    t_mean: float
    t_std: float
    beta: float
    dv: float
    omega_avg: Optional[float] = None
    omega_unique: Optional[int] = None

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in CHARACTERISTIC_FIELDS}


def _duration_stats(durations: Sequence[int]) -> tuple[int, int, float, float]:
    mean = math.fsum(durations) / len(durations)
    var = math.fsum((d - mean) ** 2 for d in durations) / len(durations)
    return min(durations), max(durations), mean, math.sqrt(var)


def compute_fjssp_characteristics(instance: Instance) -> Characteristics:
    if instance.has_workers:
        raise WrongVariantError("compute_fjssp_characteristics needs a plain FJSSP instance")
    N = instance.num_operations
    durations = [mo.duration for op in instance.operations for mo in op.machine_options]
    total_options = len(durations)
    t_min, t_max, t_mean, t_std = _duration_stats(durations)
    m_avg = total_options / N
    return Characteristics(
        n=instance.n, m=instance.m, w=0, N=N, ops_per_job=N / instance.n,
        t_min=t_min, t_max=t_max, duration_span=t_max - t_min,
        t_mean=t_mean, t_std=t_std,
        beta=m_avg / instance.m,
        dv=len(set(durations)) / total_options,
    )


def compute_fjsspw_characteristics(instance: WorkerInstance, omega_mode: str = "pairs") -> Characteristics:
    """Characteristics of an FJSSP-W instance.

    ``omega_mode`` selects the denominator of beta: ``"pairs"`` counts the
    distinct (machine, worker) pairs occurring in the instance, ``"cartesian"``
    uses ``m * w``.
    """
    if not instance.has_workers:
        raise WrongVariantError("compute_fjsspw_characteristics needs a WorkerInstance")
    N = instance.num_operations
    modes = [mode for op_modes in instance.op_modes for mode in op_modes]
    durations = [d for _, _, d in modes]
    omega_avg = len(modes) / N
    if omega_mode == "pairs":
        omega_unique = len({(k, s) for k, s, _ in modes})
    elif omega_mode == "cartesian":
        omega_unique = instance.m * instance.workers
    else:
        raise ValueError(f"unknown omega_mode {omega_mode!r}")
    t_min, t_max, t_mean, t_std = _duration_stats(durations)
    return Characteristics(
        n=instance.n, m=instance.m, w=instance.workers, N=N, ops_per_job=N / instance.n,
        t_min=t_min, t_max=t_max, duration_span=t_max - t_min,
        t_mean=t_mean, t_std=t_std,
        beta=omega_avg / omega_unique,
        dv=len(set(durations)) / (omega_avg * N),
        omega_avg=omega_avg, omega_unique=omega_unique,
    )


def compute_characteristics(instance: Instance, omega_mode: str = "pairs") -> Characteristics:
    if instance.has_workers:
        return compute_fjsspw_characteristics(instance, omega_mode)
    return compute_fjssp_characteristics(instance)


# ---------------------------------------------------------------- filtering

@dataclass(frozen=True)
class FilterSpec:
    """Inclusive bounds per characteristic plus an optional source whitelist.

    ``bounds`` maps a characteristic name to ``(lower, upper)``; either end
    may be ``None``.
    """

    bounds: dict = field(default_factory=dict)
    sources: Optional[frozenset] = None

    def __post_init__(self):
        for name, (lo, hi) in self.bounds.items():
            if name not in CHARACTERISTIC_FIELDS:
                raise ValueError(f"unknown characteristic {name!r}")
            if lo is not None and hi is not None and lo > hi:
                raise ValueError(f"lower bound exceeds upper bound for {name}: {lo} > {hi}")
        if self.sources is not None:
            object.__setattr__(self, "sources", frozenset(self.sources))

    def accepts(self, chars: Characteristics, source: Optional[str] = None) -> bool:
        if self.sources is not None and source not in self.sources:
            return False
        for name, (lo, hi) in self.bounds.items():
            value = getattr(chars, name)
            if value is None:
                return False
            if lo is not None and value < lo:
                return False
            if hi is not None and value > hi:
                return False
        return True


def filter_catalog(catalog: Iterable, spec: FilterSpec) -> list[str]:
    """Ids whose characteristics satisfy ``spec``, in input order.

    Entries are ``(id, Characteristics)`` or ``(id, source, Characteristics)``.
    """
    selected = []
    for entry in catalog:
        if len(entry) == 2:
            ident, chars = entry
            source = None
        else:
            ident, source, chars = entry[0], entry[1], entry[-1]
        if spec.accepts(chars, source):
            selected.append(ident)
    return selected
