"""NSGA-II with an external unbounded archive."""

from __future__ import annotations

import numpy as np

from ringstar.algorithms.common import breed_pair, make_record
from ringstar.algorithms.config import AlgoConfig, Budget, BudgetTracker, RunRecord
from ringstar.algorithms.ibmols import offer_all, random_population
from ringstar.core import RingSolution
from ringstar.instance import Instance
from ringstar.pareto import Archive


def fast_nondominated_sort(objs: np.ndarray) -> list[list[int]]:
    """Dominance layers, best first; indices inside a layer ascend."""
    objs = np.asarray(objs)
    k = objs.shape[0]
    le = np.all(objs[:, None, :] <= objs[None, :, :], axis=2)
    lt = np.any(objs[:, None, :] < objs[None, :, :], axis=2)
    dom = le & lt  # dom[p, q]: p dominates q
    count = dom.sum(axis=0)
    fronts: list[list[int]] = []
    current = [q for q in range(k) if count[q] == 0]
    while current:
        fronts.append(current)
        nxt = []
        for p in current:
            for q in np.flatnonzero(dom[p]):
                count[q] -= 1
                if count[q] == 0:
                    nxt.append(int(q))
        current = sorted(nxt)
    return fronts


def crowding_distance(objs: np.ndarray) -> np.ndarray:
    """Crowding distance within one front; boundary members get infinity."""
    objs = np.asarray(objs, dtype=float)
    k = objs.shape[0]
    dist = np.zeros(k)
    if k <= 2:
        dist[:] = np.inf
        return dist
    for m in range(2):
        order = np.argsort(objs[:, m], kind="stable")
        vals = objs[order, m]
        dist[order[0]] = dist[order[-1]] = np.inf
        span = vals[-1] - vals[0]
        if span == 0:
            continue
        dist[order[1:-1]] += (vals[2:] - vals[:-2]) / span
    return dist


def rank_and_crowding(objs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    objs = np.asarray(objs)
    rank = np.empty(objs.shape[0], dtype=np.int64)
    crowd = np.empty(objs.shape[0])
    for r, front in enumerate(fast_nondominated_sort(objs)):
        rank[front] = r
        crowd[front] = crowding_distance(objs[front])
    return rank, crowd


def survivors(objs: np.ndarray, size: int) -> list[int]:
    """Whole fronts while they fit, then the least crowded of the next front."""
    objs = np.asarray(objs)
    out: list[int] = []
    for front in fast_nondominated_sort(objs):
        if len(out) + len(front) <= size:
            out += front
            continue
        crowd = crowding_distance(objs[front])
        order = np.argsort(-crowd, kind="stable")
        out += [front[i] for i in order[: size - len(out)]]
        break
    return out


def crowded_tournament(rank: np.ndarray, crowd: np.ndarray, rng: np.random.Generator) -> int:
    a, b = (int(x) for x in rng.integers(rank.shape[0], size=2))
    if rank[a] != rank[b]:
        return a if rank[a] < rank[b] else b
    return a if crowd[a] >= crowd[b] else b


def nsga2_run(inst: Instance, cfg: AlgoConfig, budget: Budget, seed: int) -> RunRecord:
    rng = np.random.default_rng(seed)
    tracker = BudgetTracker(budget)
    archive: Archive = Archive()
    N = cfg.population_size
    pop: list[RingSolution] = random_population(inst, N, rng)
    tracker.charge(N)
    offer_all(archive, pop)
    rank, crowd = rank_and_crowding(np.array([s.objectives for s in pop]))
    while not tracker.exhausted:
        offspring: list[RingSolution] = []
        while len(offspring) < N and not tracker.exhausted:
            a = pop[crowded_tournament(rank, crowd, rng)]
            b = pop[crowded_tournament(rank, crowd, rng)]
            for child in breed_pair(a, b, inst, cfg.mix, rng, N - len(offspring) >= 2):
                if tracker.exhausted:
                    break
                tracker.charge()
                archive.update(child.objectives, child.keys)
                offspring.append(child)
        merged = pop + offspring
        objs = np.array([s.objectives for s in merged])
        keep = survivors(objs, N)
        pop = [merged[k] for k in keep]
        rank, crowd = rank_and_crowding(objs[keep])
    return make_record("nsga2", inst, cfg, budget, seed, archive, tracker)
