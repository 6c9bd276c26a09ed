from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional


@dataclass(frozen=True)
class Cell:
    """Best value of one solver on one instance; ``value=None`` marks infeasible."""

    value: Optional[float] = None
    time: float = 0.0

    @property
    def feasible(self) -> bool:
        return self.value is not None


@dataclass
class ResultMatrix:
    solvers: list[str]
    instances: list[str]
    cells: dict = field(default_factory=dict)  # (solver, instance) -> Cell

    def cell(self, solver: str, instance: str) -> Cell:
        return self.cells.get((solver, instance), Cell())

    def set(self, solver: str, instance: str, value: Optional[float], time: float = 0.0) -> None:
        if solver not in self.solvers:
            self.solvers.append(solver)
        if instance not in self.instances:
            self.instances.append(instance)
        self.cells[(solver, instance)] = Cell(value, time)

    def column(self, solver: str) -> dict[str, Optional[float]]:
        return {inst: self.cell(solver, inst).value for inst in self.instances}

    def without(self, solver: str) -> "ResultMatrix":
        keep = [s for s in self.solvers if s != solver]
        return ResultMatrix(keep, list(self.instances),
                            {key: c for key, c in self.cells.items() if key[0] != solver})

    @classmethod
    def from_values(cls, values: dict[str, Iterable], times: Optional[dict[str, Iterable]] = None,
                    instances: Optional[list[str]] = None) -> "ResultMatrix":
        """Build from ``{solver: [value per instance]}``; NaN or None means infeasible."""
        solvers = list(values)
        rows = {s: list(v) for s, v in values.items()}
        count = len(next(iter(rows.values()))) if rows else 0
        instances = instances or [f"i{q}" for q in range(count)]
        matrix = cls(solvers, list(instances))
        for s in solvers:
            ts = list(times[s]) if times else [0.0] * count
            for q, inst in enumerate(instances):
                v = rows[s][q]
                if v is not None and isinstance(v, float) and math.isnan(v):
                    v = None
                matrix.cells[(s, inst)] = Cell(v, ts[q])
        return matrix
