"""MiniZinc-style pairwise tournament score."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .results import Cell, ResultMatrix


@dataclass
class ScoreReport:
    scores: dict[str, float]
    instances: int

    @property
    def total(self) -> float:
        return sum(self.scores.values())

    def cap(self) -> int:
        """Largest score a single solver can reach."""
        return self.instances * (len(self.scores) - 1)


def pair_points(x: Cell, y: Cell, both_infeasible: float = 0.5) -> tuple[float, float]:
    """Points (x, y) for one instance; lower values win."""
    if not x.feasible and not y.feasible:
        return both_infeasible, both_infeasible
    if not y.feasible:
        return 1.0, 0.0
    if not x.feasible:
        return 0.0, 1.0
    if x.value < y.value:
        return 1.0, 0.0
    if y.value < x.value:
        return 0.0, 1.0
    t = x.time + y.time
    if t == 0:
        return 0.5, 0.5
    return y.time / t, x.time / t


def minizinc_score(matrix: ResultMatrix, both_infeasible: float = 0.5) -> ScoreReport:
    if len(matrix.solvers) < 2:
        raise ValueError("the score needs at least two solvers")
    scores = {s: 0.0 for s in matrix.solvers}
    for inst in matrix.instances:
        for a, b in combinations(matrix.solvers, 2):
            pa, pb = pair_points(matrix.cell(a, inst), matrix.cell(b, inst), both_infeasible)
            scores[a] += pa
            scores[b] += pb
    return ScoreReport(scores, len(matrix.instances))
