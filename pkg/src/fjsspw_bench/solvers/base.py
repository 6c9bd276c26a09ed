from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from ..schedule import Encoding


class MonotonicClock:
    """Seconds since construction, from ``time.monotonic``."""

    def __init__(self):
        self.origin = time.monotonic()

    def __call__(self) -> float:
        return time.monotonic() - self.origin


class VirtualClock:
    """Deterministic clock that advances ``step`` seconds on every reading.

    Solvers read the clock once per fitness evaluation, so virtual time is a
    scaled evaluation counter and runs become bit-reproducible.
    """

    def __init__(self, step: float = 1e-3):
        self.step = step
        self.ticks = 0

    def __call__(self) -> float:
        self.ticks += 1
        return self.ticks * self.step


@dataclass
class SolveRun:
    solver: str
    instance_id: str
    seed: Optional[int]
    best_encoding: Optional[Encoding]
    best_makespan: Optional[int]
    feasible: bool
    trace: list[tuple[float, int]] = field(default_factory=list)
    wallclock: float = 0.0
    evaluations: int = 0

    def record(self, t: float, value: int) -> bool:
        """Append ``(t, value)`` if it strictly improves the trace."""
        if self.trace and value >= self.trace[-1][1]:
            return False
        if self.trace and t < self.trace[-1][0]:
            t = self.trace[-1][0]
        self.trace.append((t, value))
        return True

    @property
    def time_to_best(self) -> float:
        return self.trace[-1][0] if self.trace else 0.0

    def to_dict(self) -> dict:
        return {
            "solver": self.solver,
            "instance": self.instance_id,
            "seed": self.seed,
            "best_makespan": self.best_makespan,
            "feasible": self.feasible,
            "best_encoding": None if self.best_encoding is None else self.best_encoding.to_dict(),
            "trace": [[t, v] for t, v in self.trace],
            "wallclock": self.wallclock,
            "evaluations": self.evaluations,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SolveRun":
        enc = data.get("best_encoding")
        return cls(
            solver=data["solver"], instance_id=data["instance"], seed=data.get("seed"),
            best_encoding=None if enc is None else Encoding.from_dict(enc),
            best_makespan=data.get("best_makespan"), feasible=bool(data.get("feasible")),
            trace=[(float(t), int(v)) for t, v in data.get("trace", [])],
            wallclock=float(data.get("wallclock", 0.0)), evaluations=int(data.get("evaluations", 0)),
        )
