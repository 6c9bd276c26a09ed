"""Genetic algorithm over (sequence, machine, worker) encodings."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Optional

from ..model import Instance
from ..rng import SplitMix64
from ..schedule import Encoding, lower_bound, makespan
from .base import MonotonicClock, SolveRun
from .greedy import greedy_encoding


@dataclass(frozen=True)
class GaConfig:
    population: int = 100
    tournament: int = 3
    elitism: int = 1
    crossover_rate: float = 0.9
    mutation_rate: float = 0.2
    time_limit: float = 10.0
    max_evaluations: Optional[int] = None
    target: Optional[int] = None  # stop once a makespan <= target is found

    def __post_init__(self):
        if self.population < 2:
            raise ValueError("population must be >= 2")
        if not 1 <= self.tournament:
            raise ValueError("tournament size must be >= 1")
        if not 0 <= self.elitism < self.population:
            raise ValueError("elitism must be in [0, population)")
        for name in ("crossover_rate", "mutation_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.time_limit <= 0:
            raise ValueError("time limit must be positive")


class Individual:
    __slots__ = ("s", "a", "w", "fitness")

    def __init__(self, s: list, a: list, w: list, fitness: Optional[int] = None):
        self.s, self.a, self.w, self.fitness = s, a, w, fitness

    def encoding(self, with_workers: bool) -> Encoding:
        return Encoding(self.s, self.a, self.w if with_workers else None)


class GeneticAlgorithm:
    def __init__(self, instance: Instance, config: GaConfig, rng: random.Random):
        self.instance = instance
        self.config = config
        self.rng = rng
        self.with_workers = instance.has_workers
        self.machines = [sorted({k for k, _, _ in modes}) for modes in instance.op_modes]
        self.workers = [
            {k: sorted(w for kk, w, _ in modes if kk == k) for k in machines}
            for modes, machines in zip(instance.op_modes, self.machines)
        ]
        self.base_sequence = [i + 1 for i, size in enumerate(instance.job_sizes) for _ in range(size)]

    # -- construction -------------------------------------------------------
    def random_individual(self) -> Individual:
        s = list(self.base_sequence)
        self.rng.shuffle(s)
        a = [self.rng.choice(ms) for ms in self.machines]
        w = [self.rng.choice(self.workers[p][k]) for p, k in enumerate(a)]
        return Individual(s, a, w)

    def from_encoding(self, enc: Encoding) -> Individual:
        w = list(enc.wv) if enc.wv is not None else [None] * len(enc.a)
        return Individual(list(enc.s), list(enc.a), w)

    # -- operators ----------------------------------------------------------
    def sequence_crossover(self, s1: list, s2: list) -> list:
        """Job-split crossover: keep parent-1 positions of a random job subset,
        fill the rest with the other jobs in parent-2 order."""
        jobs = list(range(1, self.instance.n + 1))
        keep = {j for j in jobs if self.rng.random() < 0.5}
        fill = iter(j for j in s2 if j not in keep)
        return [j if j in keep else next(fill) for j in s1]

    def assignment_crossover(self, p1: Individual, p2: Individual) -> tuple[list, list]:
        a, w = [], []
        for p in range(len(p1.a)):
            a.append(p1.a[p] if self.rng.random() < 0.5 else p2.a[p])
            w.append(p1.w[p] if self.rng.random() < 0.5 else p2.w[p])
        self.repair(a, w)
        return a, w

    def repair(self, a: list, w: list) -> None:
        """Resample workers made inadmissible by their machine gene."""
        for p, k in enumerate(a):
            allowed = self.workers[p][k]
            if w[p] not in allowed:
                w[p] = self.rng.choice(allowed)

    def swap_mutation(self, s: list) -> None:
        if len(s) > 1:
            i, j = self.rng.sample(range(len(s)), 2)
            s[i], s[j] = s[j], s[i]

    def assignment_mutation(self, a: list, w: list) -> None:
        p = self.rng.randrange(len(a))
        a[p] = self.rng.choice(self.machines[p])
        w[p] = self.rng.choice(self.workers[p][a[p]])

    def tournament(self, population: list[Individual]) -> Individual:
        picks = [population[self.rng.randrange(len(population))] for _ in range(self.config.tournament)]
        return min(picks, key=lambda ind: ind.fitness)

    def child(self, population: list[Individual]) -> Individual:
        cfg = self.config
        p1, p2 = self.tournament(population), self.tournament(population)
        if self.rng.random() < cfg.crossover_rate:
            s = self.sequence_crossover(p1.s, p2.s)
            a, w = self.assignment_crossover(p1, p2)
        else:
            s, a, w = list(p1.s), list(p1.a), list(p1.w)
        if self.rng.random() < cfg.mutation_rate:
            self.swap_mutation(s)
        if self.rng.random() < cfg.mutation_rate:
            self.assignment_mutation(a, w)
        return Individual(s, a, w)

    def evaluate(self, ind: Individual) -> int:
        ind.fitness = makespan(self.instance, ind.encoding(self.with_workers))
        return ind.fitness


def ga_solve(instance: Instance, config: GaConfig = GaConfig(), seed: Optional[int] = None,
             clock: Optional[Callable[[], float]] = None,
             observer: Optional[Callable[[int, list], None]] = None) -> SolveRun:
    """Run the GA until the time limit, the evaluation budget, the target, or
    the instance lower bound (a proven optimum) is reached.

    ``observer(generation, population)`` is called after each generation has
    been evaluated.
    """
    clock = clock or MonotonicClock()
    rng = random.Random(seed)
    ga = GeneticAlgorithm(instance, config, rng)
    run = SolveRun("ga", instance.id, seed, None, None, False)
    stop_value = lower_bound(instance)
    if config.target is not None:
        stop_value = max(stop_value, config.target)
    best: list[Optional[Individual]] = [None]

    def exhausted() -> bool:
        if config.max_evaluations is not None and run.evaluations >= config.max_evaluations:
            return True
        return best[0] is not None and best[0].fitness <= stop_value

    def evaluate(ind: Individual) -> bool:
        """Evaluate ``ind``; False once the time limit has passed."""
        ga.evaluate(ind)
        run.evaluations += 1
        now = clock()
        if best[0] is None or ind.fitness < best[0].fitness:
            best[0] = ind
            run.record(now, ind.fitness)
        run.wallclock = now
        return now < config.time_limit

    seed_enc = greedy_encoding(instance, SplitMix64(rng.getrandbits(64)))
    population = [ga.from_encoding(seed_enc)]
    running = evaluate(population[0])
    while running and not exhausted() and len(population) < config.population:
        ind = ga.random_individual()
        population.append(ind)
        running = evaluate(ind)
    generation = 0
    if observer:
        observer(generation, population)
    while running and not exhausted():
        population.sort(key=lambda ind: ind.fitness)
        nxt = population[:config.elitism]
        while running and not exhausted() and len(nxt) < config.population:
            ind = ga.child(population)
            nxt.append(ind)
            running = evaluate(ind)
        population = nxt
        generation += 1
        if observer:
            observer(generation, population)

    run.best_encoding = best[0].encoding(ga.with_workers)
    run.best_makespan = best[0].fitness
    run.feasible = True
    return run
