import csv
from itertools import combinations, permutations

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from ringstar.algorithms import AlgoConfig, Budget, RunRecord
from ringstar.assessment import (
    attainment_surface,
    mann_whitney,
    midranks,
    reference_set,
    scalarize_front,
    score_front,
    score_runs,
    write_comparison_csv,
    write_polyline_csv,
    write_scores_csv,
)
from ringstar.core import ContractError, brute_force_front, evaluate
from ringstar.instance import CostModel, random_instance

front_st = st.lists(st.tuples(st.integers(0, 20), st.integers(0, 20)), min_size=1, max_size=8)


def test_reference_set_examples():
    ref = reference_set([[(0, 2), (2, 0)], [(1, 1)]])
    assert ref.zref == [(0, 2), (1, 1), (2, 0)] and ref.zmax == (2, 2)
    ref = reference_set([[(0, 2)], [(0, 3)]])
    assert ref.zref == [(0, 2)] and ref.zmax == (0, 3)
    assert ref.ref_point == pytest.approx((0.0, 3.15))
    with pytest.raises(ContractError):
        reference_set([[]])


def test_score_front_examples():
    ref = reference_set([[(0, 10), (4, 4), (10, 0)], [(6, 6)]])
    assert score_front(ref.zref, ref) == (0.0, 0.0)
    hv, eps = score_front([(6, 6)], ref)
    assert hv > 0 and eps > 0


@given(st.lists(front_st, min_size=1, max_size=5))
def test_scores_are_nonnegative_against_pooled_reference(fronts):
    ref = reference_set(fronts)
    for f in fronts:
        hv, eps = score_front(f, ref)
        assert hv >= -1e-12 and eps >= 0


def fake_run(k, front, instance="x"):
    return RunRecord("seea", instance, k, AlgoConfig(), Budget("evals", 1), 1, 0.0,
                     [(a, b, []) for a, b in front])


def test_score_runs_rows_and_instance_check(tmp_path):
    rng = np.random.default_rng(0)
    runs = [fake_run(k, [tuple(rng.integers(0, 9, 2))]) for k in range(20)]
    ref = reference_set(r.vectors() for r in runs)
    rows = score_runs(runs, ref)
    assert [r.seed for r in rows] == list(range(20))
    write_scores_csv(tmp_path / "s.csv", rows)
    with open(tmp_path / "s.csv") as fh:
        assert len(list(csv.reader(fh))) == 21
    with pytest.raises(ContractError):
        score_runs(runs + [fake_run(99, [(1, 1)], "y")], ref)


def test_mann_whitney_examples():
    r = mann_whitney([1, 2, 3], [4, 5, 6])
    assert r.p_a_better == 0.05 and r.method == "exact"
    assert r.verdict == "no_difference"  # p must fall strictly below alpha
    assert mann_whitney([1, 2, 3], [4, 5, 6], alpha=0.051).verdict == "a_better"
    assert mann_whitney([4, 5, 6], [1, 2, 3], alpha=0.051).verdict == "b_better"
    assert mann_whitney([1, 2, 3], [1, 2, 3]).verdict == "no_difference"
    assert mann_whitney([1, 2, 3, 4], [5, 6, 7, 8]).verdict == "a_better"
    assert mann_whitney([5, 6, 7, 8], [1, 2, 3, 4], direction="higher").verdict == "a_better"
    with pytest.raises(ContractError):
        mann_whitney([], [1])


def test_midranks():
    assert midranks([3, 1, 3, 2]).tolist() == [3.5, 1.0, 3.5, 2.0]


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(1, 6))
def test_exact_matches_scipy_without_ties(seed, na, nb):
    rng = np.random.default_rng(seed)
    x = rng.permutation(100)[: na + nb].astype(float)
    a, b = x[:na], x[na:]
    r = mann_whitney(a, b, method="exact")
    assert r.p_a_better == pytest.approx(scipy.stats.mannwhitneyu(a, b, alternative="less", method="exact").pvalue)
    assert r.p_b_better == pytest.approx(
        scipy.stats.mannwhitneyu(a, b, alternative="greater", method="exact").pvalue)


def test_exact_with_ties_matches_enumeration():
    a, b = [1, 2, 2, 5], [2, 3, 5, 5, 7]
    pooled = a + b
    ranks = scipy.stats.rankdata(pooled)
    observed = ranks[:4].sum()
    sums = [ranks[list(c)].sum() for c in combinations(range(9), 4)]
    expected = sum(s <= observed + 1e-9 for s in sums) / len(sums)
    assert mann_whitney(a, b).p_a_better == pytest.approx(expected, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(7, 20), st.integers(7, 20))
def test_normal_branch_matches_scipy(seed, na, nb):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 15, na).astype(float)
    b = rng.integers(0, 15, nb).astype(float)
    r = mann_whitney(a, b, method="normal")
    ref = scipy.stats.mannwhitneyu(a, b, alternative="less", method="asymptotic", use_continuity=True)
    assert r.p_a_better == pytest.approx(ref.pvalue, rel=1e-9, abs=1e-12)
    assert r.method == "normal" and mann_whitney(a, b).method == "normal"


def test_exact_and_normal_agree_on_balanced_twelve():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(300):
        x = rng.permutation(1000)[:12].astype(float)
        a, b = x[:6], x[6:]
        worst = max(worst, abs(mann_whitney(a, b, method="exact").p_value
                               - mann_whitney(a, b, method="normal").p_value))
    assert worst <= 0.02


def test_attainment_examples():
    f = [(0, 9), (3, 4), (7, 1)]
    assert attainment_surface([f], 0.5) == [(0, 9), (3, 9), (3, 4), (7, 4), (7, 1)]
    assert attainment_surface([f, f, f], 0.9) == attainment_surface([f], 1.0)
    assert attainment_surface([[(0, 2)], [(2, 0)]], 1.0) == [(2, 2)]
    assert attainment_surface([[(0, 2)], [(2, 0)]], 0.5) == [(0, 2), (2, 2), (2, 0)]
    with pytest.raises(ValueError):
        attainment_surface([f], 0.0)


@given(st.lists(front_st, min_size=1, max_size=6), st.floats(0.05, 1.0))
def test_attainment_points_are_attained(fronts, level):
    poly = attainment_surface(fronts, level)
    need = int(np.ceil(level * len(fronts) - 1e-9))
    for x, y in poly[::2]:
        hits = sum(any(a <= x and b <= y for a, b in f) for f in fronts)
        assert hits >= need


def test_scalarize_examples():
    assert scalarize_front([(10, 5), (8, 9)], 3) == (15, (10, 5))
    assert scalarize_front([(4, 4)], 5) == (8, (4, 4))
    with pytest.raises(ValueError):
        scalarize_front([(4, 4)], 4)


def test_scalarize_matches_exhaustive_minimum():
    inst = random_instance(7, np.random.default_rng(12), model=CostModel("scalarized", 5))
    value, _ = scalarize_front([(p.f1, p.f2) for p in brute_force_front(inst)], 5)
    best = min(sum(evaluate((0,) + order, inst))
               for k in range(7) for sub in combinations(range(1, 7), k) for order in permutations(sub))
    assert value == best


def test_csv_writers(tmp_path):
    r = mann_whitney([1, 2], [3, 4])
    write_comparison_csv(tmp_path / "c.csv", [("a", "b", "hv", r)])
    write_polyline_csv(tmp_path / "p.csv", [(0, 2), (2, 2)])
    with open(tmp_path / "c.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["algo_a", "algo_b", "metric", "p_value", "verdict", "method"]
    assert rows[1][:3] == ["a", "b", "hv"] and float(rows[1][3]) == r.p_value
    assert (tmp_path / "p.csv").read_text().splitlines() == ["f1,f2", "0,2", "2,2"]
