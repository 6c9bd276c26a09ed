from .gaps import GapDomainError, fraction_within, gap_curve, instance_gaps, relative_gap
from .plots import gantt_chart, gap_plot, nemenyi_diagram, progress_plot
from .ranking import RankingReport, critical_distance, friedman_nemenyi, friedman_statistic, rank_matrix
from .results import Cell, ResultMatrix
from .scoring import ScoreReport, minizinc_score, pair_points

__all__ = [
    "Cell", "GapDomainError", "RankingReport", "ResultMatrix", "ScoreReport", "critical_distance",
    "fraction_within", "friedman_nemenyi", "friedman_statistic", "gantt_chart", "gap_curve", "gap_plot",
    "instance_gaps", "minizinc_score", "nemenyi_diagram", "pair_points", "progress_plot", "rank_matrix",
    "relative_gap",
]
