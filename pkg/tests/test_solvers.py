import random

import pytest

from fjsspw_bench.instance_io import parse_fjssp
from fjsspw_bench.rng import SplitMix64
from fjsspw_bench.schedule import brute_force_solve, decode_schedule, lower_bound, schedule_conflicts, validate_encoding
from fjsspw_bench.solvers import GaConfig, SolveRun, VirtualClock, ga_solve, greedy_encoding, greedy_solve
from fjsspw_bench.solvers.ga import GeneticAlgorithm
from oracles import random_instance


def test_greedy_single_op():
    run = greedy_solve(parse_fjssp("1 2\n1 2 1 4 2 3\n"), seed=0)
    assert run.best_makespan == 3 and run.feasible


@pytest.mark.parametrize("seed", range(10))
def test_greedy_tiny(tiny, seed):
    run = greedy_solve(tiny, seed=seed)
    assert run.feasible and run.best_makespan >= 9
    assert decode_schedule(tiny, run.best_encoding).makespan == run.best_makespan


def test_greedy_prefers_shortest_duration(tiny):
    # frontier {O11, O21}: shortest option overall is O11 on M2/W1 (2)
    enc = greedy_encoding(tiny, SplitMix64(0))
    assert enc.s[0] == 1 and (enc.a[0], enc.wv[0]) == (2, 1)


def test_greedy_determinism_and_tie_breaks():
    inst = parse_fjssp("3 3\n1 3 1 5 2 5 3 5\n1 3 1 5 2 5 3 5\n1 3 1 5 2 5 3 5\n")
    a = greedy_solve(inst, seed=7, clock=VirtualClock()).to_dict()
    b = greedy_solve(inst, seed=7, clock=VirtualClock()).to_dict()
    assert a == b
    encodings = {greedy_encoding(inst, SplitMix64(s)).key() for s in range(30)}
    assert len(encodings) > 1


def test_greedy_earliest_finish_variant(tiny):
    run = greedy_solve(tiny, seed=1, earliest_finish=True)
    assert run.solver == "greedy-ef" and run.best_makespan >= 9


def test_greedy_always_feasible():
    rng = random.Random(5)
    for _ in range(200):
        inst = random_instance(rng, max_ops=20, workers=rng.random() < 0.7, max_jobs=6)
        for ef in (False, True):
            run = greedy_solve(inst, seed=rng.randrange(1000), earliest_finish=ef)
            sched = decode_schedule(inst, run.best_encoding)
            assert run.feasible and sched.makespan == run.best_makespan
            assert schedule_conflicts(inst, sched) == []


def test_ga_single_op():
    run = ga_solve(parse_fjssp("1 2\n1 2 1 4 2 3\n"), GaConfig(time_limit=1.0), seed=0)
    assert run.best_makespan == 3 and run.evaluations == 1


@pytest.mark.parametrize("seed", range(5))
def test_ga_tiny_reaches_optimum(tiny, seed):
    run = ga_solve(tiny, GaConfig(time_limit=1.0), seed=seed)
    assert run.best_makespan == 9


def test_ga_trace_and_bounds():
    rng = random.Random(8)
    for _ in range(10):
        inst = random_instance(rng, max_ops=25, max_jobs=6)
        run = ga_solve(inst, GaConfig(population=20, time_limit=5.0, max_evaluations=400), seed=3)
        values = [v for _, v in run.trace]
        times = [t for t, _ in run.trace]
        assert all(b < a for a, b in zip(values, values[1:]))
        assert times == sorted(times)
        assert run.best_makespan == values[-1] >= lower_bound(inst)
        assert validate_encoding(inst, run.best_encoding) == []
        assert run.evaluations <= 400


def test_ga_closure_every_generation():
    rng = random.Random(13)
    for _ in range(12):
        inst = random_instance(rng, max_ops=14, max_jobs=5, workers=rng.random() < 0.8)
        bad = []

        def observe(generation, population):
            for ind in population:
                if validate_encoding(inst, ind.encoding(inst.has_workers)):
                    bad.append(generation)

        ga_solve(inst, GaConfig(population=16, time_limit=5.0, max_evaluations=300, mutation_rate=0.8),
                 seed=1, observer=observe)
        assert bad == []


def test_operators_preserve_validity():
    rng = random.Random(21)
    for _ in range(50):
        inst = random_instance(rng, max_ops=12, max_jobs=5)
        ga = GeneticAlgorithm(inst, GaConfig(), random.Random(rng.randrange(10**6)))
        p1, p2 = ga.random_individual(), ga.random_individual()
        s = ga.sequence_crossover(p1.s, p2.s)
        a, w = ga.assignment_crossover(p1, p2)
        ga.swap_mutation(s)
        ga.assignment_mutation(a, w)
        from fjsspw_bench.schedule import Encoding
        assert validate_encoding(inst, Encoding(s, a, w)) == []


def test_ga_reproducible_with_virtual_clock():
    inst = random_instance(random.Random(4), max_ops=20, max_jobs=5)
    cfg = GaConfig(population=12, time_limit=0.5)
    a = ga_solve(inst, cfg, seed=11, clock=VirtualClock()).to_dict()
    b = ga_solve(inst, cfg, seed=11, clock=VirtualClock()).to_dict()
    assert a == b


def test_ga_target_stops_early(tiny):
    run = ga_solve(tiny, GaConfig(time_limit=5.0, target=20), seed=0)
    assert run.best_makespan <= 20 and run.evaluations < 100


def test_ga_config_validation():
    for bad in (dict(population=1), dict(crossover_rate=1.5), dict(elitism=5, population=5), dict(time_limit=0)):
        with pytest.raises(ValueError):
            GaConfig(**bad)


def test_solve_run_record_and_round_trip():
    run = SolveRun("x", "i", 1, None, None, False)
    assert run.record(0.1, 10) and not run.record(0.2, 10) and run.record(0.05, 8)
    assert run.trace == [(0.1, 10), (0.1, 8)]
    assert SolveRun.from_dict(run.to_dict()) == run


def test_ga_never_beats_brute_force():
    rng = random.Random(99)
    for _ in range(15):
        inst = random_instance(rng, max_ops=7)
        opt, _ = brute_force_solve(inst)
        run = ga_solve(inst, GaConfig(population=20, time_limit=1.0, max_evaluations=500), seed=2)
        assert run.best_makespan >= opt
