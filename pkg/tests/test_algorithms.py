import time
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ringstar.algorithms import (
    ALGORITHMS,
    AlgoConfig,
    Budget,
    BudgetTracker,
    LSState,
    crowding_distance,
    fast_nondominated_sort,
    ibea_truncate,
    ibmols_step,
    run_algorithm,
)
from ringstar.algorithms.ibea import protected_extremes
from ringstar.algorithms.ibmols import random_population
from ringstar.algorithms.nsga2 import survivors
from ringstar.core import brute_force_front, decode, encode
from ringstar.indicators import fitness_all
from ringstar.instance import load_instance, random_instance
from ringstar.pareto import Archive, NormBounds, normalize_array

from conftest import naive_front

SMALL = AlgoConfig(population_size=10, ls_population=6, step_fraction=0.05)


@pytest.fixture(scope="module")
def inst12():
    return random_instance(12, np.random.default_rng(77))


def check_record(rec, inst):
    vecs = rec.vectors()
    assert vecs == naive_front(vecs)
    for f1, f2, keys in rec.front:
        g = np.array([-1.0 if k is None else k for k in keys])
        assert decode(g, inst).objectives == (f1, f2)


@pytest.mark.parametrize("algo", sorted(ALGORITHMS))
def test_determinism_and_budget(algo, inst12):
    budget = Budget("evals", 4000)
    a = run_algorithm(algo, inst12, SMALL, budget, 5)
    b = run_algorithm(algo, inst12, SMALL, budget, 5)
    assert a.front == b.front and a.trace == b.trace and a.launches_ls == b.launches_ls
    assert a.evaluations == b.evaluations == 4000
    check_record(a, inst12)
    c = run_algorithm(algo, inst12, SMALL, budget, 6)
    assert c.front != a.front or c.trace != a.trace


@pytest.mark.parametrize("algo", sorted(ALGORITHMS))
def test_zero_budget_keeps_initial_population(algo, inst12):
    rec = run_algorithm(algo, inst12, SMALL, Budget("evals", 0), 9)
    pop = random_population(inst12, SMALL.population_size, np.random.default_rng(9))
    assert rec.vectors() == naive_front(s.objectives for s in pop)
    assert rec.evaluations == SMALL.population_size


def test_unknown_algorithm(inst12):
    with pytest.raises(ValueError, match="ibmols"):
        run_algorithm("tabu", inst12, SMALL, Budget("evals", 10), 1)


def test_budget_growth_never_hurts(inst12):
    cfg = replace(SMALL, population_size=8)
    short = run_algorithm("ibmols", inst12, cfg, Budget("evals", 3000), 2)
    long = run_algorithm("ibmols", inst12, cfg, Budget("evals", 6000), 2)
    for z in short.vectors():
        assert any(w[0] <= z[0] and w[1] <= z[1] for w in long.vectors())


def test_wall_clock_budget(inst12):
    run_algorithm("ibmols", inst12, SMALL, Budget("evals", 100), 1)  # warm the compiled code
    for algo in ("ibmols", "seea", "pcs"):
        t0 = time.perf_counter()
        rec = run_algorithm(algo, inst12, SMALL, Budget("seconds", 0.5), 1)
        assert 0.5 <= time.perf_counter() - t0 < 1.5
        assert rec.elapsed_seconds >= 0.5


def test_ibmols_step_on_exact_front():
    inst = random_instance(6, np.random.default_rng(31))
    front = brute_force_front(inst)
    assert len(front) >= 2
    keys = [encode(p.ring, inst.n) for p in front]
    archive: Archive = Archive()
    for p, g in zip(front, keys):
        archive.update((p.f1, p.f2), g)
    state = LSState(inst, keys)
    tracker = BudgetTracker(Budget("evals", 10**6))
    improved = ibmols_step(state, archive, AlgoConfig(population_size=len(keys)),
                           np.random.default_rng(0), tracker)
    assert improved is False
    assert archive.vectors() == [(p.f1, p.f2) for p in front]
    assert tracker.used > 0


def test_ibmols_finds_small_front():
    inst = random_instance(6, np.random.default_rng(4))
    rec = run_algorithm("ibmols", inst, AlgoConfig(population_size=10), Budget("evals", 200_000), 1)
    assert rec.vectors() == [(p.f1, p.f2) for p in brute_force_front(inst)]


# ---- IBEA ----

def naive_truncate(objs, size, kappa):
    """Recompute every remaining fitness from scratch after each deletion."""
    norm = normalize_array(objs, NormBounds.of(objs))
    alive = list(range(objs.shape[0]))
    keep = set(protected_extremes(objs))
    while len(alive) > size:
        fit = fitness_all(norm[alive], kappa)
        cand = [(fit[t], k) for t, k in enumerate(alive) if k not in keep]
        alive.remove(min(cand)[1])
    return alive


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), k=st.integers(3, 8))
def test_ibea_truncation_matches_recomputation(seed, k):
    rng = np.random.default_rng(seed)
    objs = rng.integers(0, 50, size=(k, 2)).astype(float)
    if np.unique(objs, axis=0).shape[0] < k:
        return
    fit = np.sort(fitness_all(normalize_array(objs, NormBounds.of(objs)), 0.05))
    if np.any(np.diff(fit) <= 1e-9 * np.maximum(1.0, np.abs(fit[1:]))):
        return
    size = int(rng.integers(2, k))
    assert sorted(ibea_truncate(objs, size, 0.05)) == sorted(naive_truncate(objs, size, 0.05))


def test_ibea_truncation_keeps_extremes_and_size():
    objs = np.array([[0, 9], [1, 7], [2, 6], [3, 4], [6, 3], [8, 1], [9, 0], [5, 5]], dtype=float)
    kept = ibea_truncate(objs, 4, 0.05)
    assert len(kept) == 4 and 0 in kept and 6 in kept
    kept = ibea_truncate(np.vstack([objs, objs + 1]), 8, 0.05)
    assert len(kept) == 8


# ---- NSGA-II ----

def naive_layers(objs):
    left = list(range(len(objs)))
    layers = []
    while left:
        layer = [p for p in left
                 if not any(np.all(objs[q] <= objs[p]) and np.any(objs[q] < objs[p]) for q in left)]
        layers.append(layer)
        left = [p for p in left if p not in layer]
    return layers


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 12), st.integers(0, 12)), min_size=1, max_size=20))
def test_nondominated_sort_matches_peeling(pts):
    objs = np.array(pts)
    assert fast_nondominated_sort(objs) == naive_layers(objs)


def test_mutually_nondominated_is_one_front():
    objs = np.array([[0, 5], [1, 4], [2, 2], [5, 0]])
    assert fast_nondominated_sort(objs) == [[0, 1, 2, 3]]


def test_crowding_distance():
    objs = np.array([[0, 10], [2, 6], [5, 3], [10, 0]])
    d = crowding_distance(objs)
    assert np.isinf(d[0]) and np.isinf(d[3])
    assert d[1] == pytest.approx(5 / 10 + 7 / 10)
    assert d[2] == pytest.approx(8 / 10 + 6 / 10)
    assert np.all(np.isinf(crowding_distance(objs[:2])))


def test_survivors_prefer_rank_then_crowding():
    objs = np.array([[0, 10], [2, 6], [3, 5.5], [5, 3], [10, 0], [9, 9]])
    kept = survivors(objs, 4)
    assert 5 not in kept and {0, 4} <= set(kept) and len(kept) == 4


# ---- cooperative schemes ----

def test_acs_full_threshold_equals_pcs(inst12):
    budget = Budget("evals", 20_000)
    pcs = run_algorithm("pcs", inst12, SMALL, budget, 3)
    acs = run_algorithm("acs", inst12, replace(SMALL, delta=1.0), budget, 3)
    assert pcs.launches_ls > 0
    assert acs.trace == pcs.trace and acs.front == pcs.front
    assert acs.launches_ls == pcs.launches_ls == len(pcs.trace)


def test_acs_low_threshold_equals_seea_when_never_launching():
    # on eil51 the archive still grows at every boundary of this short run
    inst = load_instance("eil51")
    budget = Budget("evals", 20_000)
    acs = run_algorithm("acs", inst, replace(SMALL, delta=0.5), budget, 3)
    seea = run_algorithm("seea", inst, SMALL, budget, 3)
    assert acs.launches_ls == 0 and min(t["contribution"] for t in acs.trace) > 0.5
    assert acs.front == seea.front


def test_short_budget_is_pure_seea(inst12):
    budget = Budget("evals", 500)
    cfg = replace(SMALL, step_fraction=0.99)  # the budget runs out at the first boundary
    pcs = run_algorithm("pcs", inst12, cfg, budget, 8)
    assert pcs.launches_ls == 0 and pcs.front == run_algorithm("seea", inst12, cfg, budget, 8).front


def test_hybrid_trace_contents(inst12):
    rec = run_algorithm("acs", inst12, SMALL, Budget("evals", 20_000), 4)
    assert rec.trace and rec.launches_ls == sum(t["launched"] for t in rec.trace)
    for t in rec.trace:
        assert 0.5 <= t["contribution"] <= 1.0
        assert t["launched"] == (t["contribution"] <= SMALL.delta)
    evals = [t["evaluations"] for t in rec.trace]
    assert evals == sorted(evals)


def test_config_validation():
    with pytest.raises(ValueError):
        AlgoConfig(population_size=1)
    with pytest.raises(ValueError):
        AlgoConfig(delta=0.4)
    with pytest.raises(ValueError):
        AlgoConfig(step_fraction=1.0)
    with pytest.raises(ValueError):
        Budget("evals", -1)
    assert Budget.parse("seconds:20") == Budget("seconds", 20.0)
    assert Budget.parse("evals:1000").step(0.005) == 5
