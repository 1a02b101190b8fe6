"""Indicator-based evolutionary algorithm with an unbounded archive."""

from __future__ import annotations

import numpy as np

from ringstar.algorithms.common import breed_pair, make_record
from ringstar.algorithms.config import AlgoConfig, Budget, BudgetTracker, RunRecord
from ringstar.algorithms.ibmols import offer_all, random_population
from ringstar.core import RingSolution
from ringstar.indicators import eps_matrix, fitness_all
from ringstar.instance import Instance
from ringstar.pareto import Archive, NormBounds, normalize_array


def protected_extremes(objs: np.ndarray) -> tuple[int, int]:
    """Lexicographic minima on (f1, f2) and (f2, f1); the first index wins ties."""
    objs = np.asarray(objs)
    a = int(np.lexsort((objs[:, 1], objs[:, 0]))[0])
    b = int(np.lexsort((objs[:, 0], objs[:, 1]))[0])
    return a, b


def population_fitness(objs: np.ndarray, kappa: float) -> np.ndarray:
    objs = np.asarray(objs, dtype=float)
    return fitness_all(normalize_array(objs, NormBounds.of(objs)), kappa)


def ibea_truncate(objs: np.ndarray, size: int, kappa: float) -> list[int]:
    """Indices surviving iterative worst-deletion down to ``size`` members.

    Normalisation bounds come from the full merged set. After each deletion
    the remaining fitness values drop the deleted member's term.
    """
    objs = np.asarray(objs, dtype=float)
    norm = normalize_array(objs, NormBounds.of(objs))
    terms = np.exp(-eps_matrix(norm) / kappa)
    np.fill_diagonal(terms, 0.0)
    fit = -terms.sum(axis=0)
    alive = list(range(objs.shape[0]))
    keep = set(protected_extremes(objs))
    while len(alive) > size:
        cand = [k for k in alive if k not in keep]
        worst = min(cand, key=lambda k: (fit[k], k))
        alive.remove(worst)
        fit += terms[worst]
    return alive


def binary_tournament(fit: np.ndarray, rng: np.random.Generator) -> int:
    a, b = (int(x) for x in rng.integers(fit.shape[0], size=2))
    return a if fit[a] >= fit[b] else b


def ibea_run(inst: Instance, cfg: AlgoConfig, budget: Budget, seed: int) -> RunRecord:
    rng = np.random.default_rng(seed)
    tracker = BudgetTracker(budget)
    archive: Archive = Archive()
    N = cfg.population_size
    pop: list[RingSolution] = random_population(inst, N, rng)
    tracker.charge(N)
    offer_all(archive, pop)
    while not tracker.exhausted:
        fit = population_fitness([s.objectives for s in pop], cfg.kappa)
        offspring: list[RingSolution] = []
        while len(offspring) < N and not tracker.exhausted:
            a = pop[binary_tournament(fit, rng)]
            b = pop[binary_tournament(fit, rng)]
            for child in breed_pair(a, b, inst, cfg.mix, rng, N - len(offspring) >= 2):
                if tracker.exhausted:
                    break
                tracker.charge()
                archive.update(child.objectives, child.keys)
                offspring.append(child)
        merged = pop + offspring
        keep = ibea_truncate(np.array([s.objectives for s in merged]), N, cfg.kappa)
        pop = [merged[k] for k in keep]
    return make_record("ibea", inst, cfg, budget, seed, archive, tracker)
