from .base import MonotonicClock, SolveRun, VirtualClock
from .ga import GaConfig, GeneticAlgorithm, ga_solve
from .greedy import greedy_encoding, greedy_solve

__all__ = ["GaConfig", "GeneticAlgorithm", "MonotonicClock", "SolveRun", "VirtualClock", "ga_solve",
           "greedy_encoding", "greedy_solve"]
