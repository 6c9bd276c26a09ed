"""Friedman omnibus test with Nemenyi post-hoc critical distance."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2, rankdata, studentized_range

from .results import ResultMatrix

# Studentized range quantile / sqrt(2) at alpha = 0.05 for k = 2..20 treatments.
Q_ALPHA_005 = {
    2: 1.959964, 3: 2.343701, 4: 2.569032, 5: 2.727774, 6: 2.849705, 7: 2.948320,
    8: 3.030878, 9: 3.101730, 10: 3.163684, 11: 3.218654, 12: 3.268004, 13: 3.312739,
    14: 3.353618, 15: 3.391230, 16: 3.426041, 17: 3.458425, 18: 3.488685, 19: 3.517073,
    20: 3.543799,
}


@dataclass
class RankingReport:
    average_ranks: dict[str, float]
    statistic: float
    p_value: float
    critical_distance: float
    significant: bool
    groups: list[list[str]]
    alpha: float
    instances: int


def rank_matrix(matrix: ResultMatrix) -> np.ndarray:
    """Ranks per instance (rows) and solver (columns); infeasible ranks worst, ties averaged."""
    values = np.array([[matrix.cell(s, inst).value if matrix.cell(s, inst).feasible else np.inf
                        for s in matrix.solvers] for inst in matrix.instances], dtype=float)
    return np.vstack([rankdata(row) for row in values]) if len(values) else values


def friedman_statistic(ranks: np.ndarray) -> float:
    """12 N / (k (k+1)) * (sum_j R_j^2 - k (k+1)^2 / 4) over average ranks R_j."""
    nq, k = ranks.shape
    avg = ranks.mean(axis=0)
    stat = 12.0 * nq / (k * (k + 1)) * (float(np.sum(avg ** 2)) - k * (k + 1) ** 2 / 4.0)
    return max(stat, 0.0)


def nemenyi_q(k: int, alpha: float = 0.05) -> float:
    """Tabulated for alpha = 0.05 and k <= 20, otherwise from the studentized range distribution."""
    if k < 2:
        raise ValueError(f"need k >= 2, got {k}")
    if alpha == 0.05 and k in Q_ALPHA_005:
        return Q_ALPHA_005[k]
    return float(studentized_range.ppf(1.0 - alpha, k, np.inf)) / math.sqrt(2.0)


def critical_distance(k: int, nq: int, alpha: float = 0.05) -> float:
    return nemenyi_q(k, alpha) * math.sqrt(k * (k + 1) / (6.0 * nq))


def nonsignificant_groups(average_ranks: dict[str, float], cd: float) -> list[list[str]]:
    """Maximal runs of solvers (sorted by rank) whose rank spread is below ``cd``."""
    order = sorted(average_ranks, key=lambda s: (average_ranks[s], s))
    groups: list[list[str]] = []
    for lo in range(len(order)):
        hi = lo
        while hi + 1 < len(order) and average_ranks[order[hi + 1]] - average_ranks[order[lo]] < cd:
            hi += 1
        if hi > lo and (not groups or order.index(groups[-1][-1]) < hi):
            groups.append(order[lo:hi + 1])
    return groups


def friedman_nemenyi(matrix: ResultMatrix, alpha: float = 0.05) -> RankingReport:
    k, nq = len(matrix.solvers), len(matrix.instances)
    if k < 2 or nq < 2:
        raise ValueError(f"need at least 2 solvers and 2 instances, got {k} and {nq}")
    ranks = rank_matrix(matrix)
    avg = dict(zip(matrix.solvers, (float(r) for r in ranks.mean(axis=0))))
    stat = friedman_statistic(ranks)
    p = float(chi2.sf(stat, k - 1))
    cd = critical_distance(k, nq, alpha)
    significant = p < alpha
    if significant:
        groups = nonsignificant_groups(avg, cd)
    else:
        groups = [sorted(matrix.solvers, key=lambda s: (avg[s], s))]
    return RankingReport(avg, stat, p, cd, significant, groups, alpha, nq)
