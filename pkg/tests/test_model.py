import math
import random
from fractions import Fraction

import pytest

from fjsspw_bench.model import (
    Characteristics,
    FilterSpec,
    Instance,
    Job,
    MachineOption,
    ModelError,
    Operation,
    WorkerInstance,
    WorkerOption,
    WrongVariantError,
    compute_characteristics,
    compute_fjssp_characteristics,
    compute_fjsspw_characteristics,
    filter_catalog,
)
from oracles import options_of, random_instance


def plain(rows, m):
    """rows: per job, per op, list of (machine, duration)."""
    jobs = tuple(Job(tuple(Operation(tuple(MachineOption(k, d) for k, d in op)) for op in job)) for job in rows)
    return Instance(jobs, m=m)


def test_fully_flexible_beta_is_one():
    inst = plain([[[(1, 3), (2, 4)], [(1, 5), (2, 5)]], [[(1, 2), (2, 7)]]], m=2)
    assert compute_fjssp_characteristics(inst).beta == 1.0


def test_single_option_instance():
    c = compute_fjssp_characteristics(plain([[[(1, 5)]]], m=1))
    assert (c.beta, c.dv, c.t_min, c.t_max, c.duration_span) == (1.0, 1.0, 5, 5, 0)


def test_three_op_example():
    inst = plain([[[(1, 3), (2, 4)], [(1, 5)]], [[(1, 3), (2, 4)]]], m=2)
    c = compute_fjssp_characteristics(inst)
    assert c.beta == pytest.approx(5 / 3 / 2, abs=1e-9)
    assert c.dv == pytest.approx(0.6, abs=1e-9)
    assert c.N == 3 and c.ops_per_job == 1.5
    durations = [3, 4, 5, 3, 4]
    assert c.t_mean == pytest.approx(sum(durations) / 5)
    assert c.t_std == pytest.approx(math.sqrt(sum((d - 3.8) ** 2 for d in durations) / 5))


def test_wrong_variant(tiny):
    with pytest.raises(WrongVariantError):
        compute_fjssp_characteristics(tiny)
    with pytest.raises(WrongVariantError):
        compute_fjsspw_characteristics(plain([[[(1, 5)]]], m=1))


def test_tiny_w_characteristics(tiny):
    c = compute_fjsspw_characteristics(tiny)
    assert c.omega_avg == pytest.approx(7 / 3, abs=1e-9)
    assert c.omega_unique == 4
    assert c.beta == pytest.approx(7 / 12, abs=1e-9)
    assert c.dv == pytest.approx(5 / 7, abs=1e-9)
    assert c.w == 2


def test_degenerate_worker_instance():
    op = Operation((MachineOption(1, worker_options=(WorkerOption(1, 7),)),))
    c = compute_fjsspw_characteristics(WorkerInstance((Job((op,)),), m=1, workers=1))
    assert c.beta == 1.0 and c.dv == 1.0


def test_fully_flexible_worker_instance():
    rng = random.Random(3)
    m, w = 2, 3
    ops = [Operation(tuple(MachineOption(k, worker_options=tuple(WorkerOption(s, rng.randint(1, 9))
                                                                 for s in range(1, w + 1)))
                           for k in range(1, m + 1))) for _ in range(4)]
    inst = WorkerInstance((Job(tuple(ops[:2])), Job(tuple(ops[2:]))), m=m, workers=w)
    assert compute_fjsspw_characteristics(inst).beta == 1.0
    assert compute_fjsspw_characteristics(inst, omega_mode="cartesian").beta == 1.0


def test_cartesian_switch(tiny):
    # pairs {(1,1),(1,2),(2,1),(2,2)} happen to cover m*w here
    assert compute_fjsspw_characteristics(tiny, "cartesian").omega_unique == 4
    op = Operation((MachineOption(1, worker_options=(WorkerOption(1, 7),)),))
    inst = WorkerInstance((Job((op,)),), m=2, workers=3)
    assert compute_fjsspw_characteristics(inst).omega_unique == 1
    assert compute_fjsspw_characteristics(inst, "cartesian").omega_unique == 6


def test_invalid_options_rejected():
    with pytest.raises(ModelError):
        MachineOption(1, 0)
    with pytest.raises(ModelError):
        MachineOption(0, 3)
    with pytest.raises(ModelError):
        MachineOption(1, worker_options=(WorkerOption(1, 2), WorkerOption(1, 3)))


@pytest.mark.parametrize("seed", range(40))
def test_characteristic_properties(seed):
    rng = random.Random(seed)
    workers = seed % 2 == 0
    inst = random_instance(rng, max_ops=10, workers=workers)
    c = compute_characteristics(inst)
    assert c == compute_characteristics(inst)
    assert 0 < c.beta <= 1
    table = options_of(inst)
    total = sum(len(rows) for rows in table)
    distinct = len({d for rows in table for _, _, d in rows})
    assert Fraction(c.dv).limit_denominator(10_000) * total == distinct
    if workers:
        assert c.omega_avg <= c.omega_unique
    else:
        full = all(len(rows) == inst.m for rows in table)
        assert (c.beta == 1.0) == full


def _chars(beta):
    return Characteristics(n=1, m=1, w=0, N=1, ops_per_job=1, t_min=1, t_max=1, duration_span=0, t_mean=1,
                           t_std=0, beta=beta, dv=1, omega_avg=0, omega_unique=0)


def test_filter_catalog():
    catalog = [("a", "X", _chars(0.3)), ("b", "Y", _chars(0.58)), ("c", "X", _chars(1.0))]
    assert filter_catalog(catalog, FilterSpec()) == ["a", "b", "c"]
    spec = FilterSpec({"beta": (0.5, None)})
    assert filter_catalog(catalog, spec) == ["b", "c"]
    assert filter_catalog([e for e in catalog if e[0] in filter_catalog(catalog, spec)], spec) == ["b", "c"]
    assert filter_catalog(catalog, FilterSpec(sources=frozenset({"X"}))) == ["a", "c"]
    assert filter_catalog([(i, c) for i, _, c in catalog], FilterSpec({"beta": (None, 0.5)})) == ["a"]


def test_filter_spec_rejects_inverted_bounds():
    with pytest.raises(ValueError):
        FilterSpec({"beta": (0.8, 0.2)})
