from __future__ import annotations

from bisect import bisect_right
from typing import Mapping, Optional


class GapDomainError(ValueError):
    pass


def relative_gap(c_fb: float, c_best: float) -> float:
    """(found - best) / best."""
    if c_best <= 0:
        raise GapDomainError(f"best-known value must be positive, got {c_best}")
    return (c_fb - c_best) / c_best


def instance_gaps(values: Mapping[str, Optional[float]], best_known: Mapping[str, float]) -> dict[str, Optional[float]]:
    return {inst: None if v is None else relative_gap(v, best_known[inst]) for inst, v in values.items()}


def gap_curve(values: Mapping[str, Optional[float]], best_known: Mapping[str, float]) -> list[tuple[float, float]]:
    """Step curve of the fraction of instances solved within each gap.

    Returns the breakpoints ``(x, fraction with gap <= x)`` in increasing x.
    Infeasible or missing instances count in the denominator only, so the
    curve may stay below 1.
    """
    total = len(values)
    if total == 0:
        return []
    gaps = sorted(g for g in instance_gaps(values, best_known).values() if g is not None)
    points = []
    for q, g in enumerate(gaps):
        if q + 1 < len(gaps) and gaps[q + 1] == g:
            continue
        points.append((g, (q + 1) / total))
    return points


def fraction_within(curve: list[tuple[float, float]], x: float) -> float:
    xs = [p[0] for p in curve]
    idx = bisect_right(xs, x)
    return curve[idx - 1][1] if idx else 0.0
