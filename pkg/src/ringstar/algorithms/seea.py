"""Simple elitist evolutionary algorithm: parents come only from the archive."""

from __future__ import annotations

import numpy as np

from ringstar.algorithms.common import breed_pair, make_record
from ringstar.algorithms.config import AlgoConfig, Budget, BudgetTracker, RunRecord
from ringstar.algorithms.ibmols import random_population
from ringstar.core import RingSolution, decode
from ringstar.instance import Instance
from ringstar.pareto import Archive


class SEEA:
    """Generational engine shared by the stand-alone run and the hybrids."""

    def __init__(self, inst: Instance, cfg: AlgoConfig, rng: np.random.Generator,
                 tracker: BudgetTracker, archive: Archive | None = None) -> None:
        self.inst = inst
        self.cfg = cfg
        self.rng = rng
        self.tracker = tracker
        self.archive: Archive = archive if archive is not None else Archive()
        self.population: list[RingSolution] = []
        self.generations = 0

    def _offer(self, s: RingSolution) -> None:
        self.archive.update(s.objectives, s.keys)

    def initialise(self) -> None:
        self.population = random_population(self.inst, self.cfg.population_size, self.rng)
        self.tracker.charge(len(self.population))
        for s in self.population:
            self._offer(s)

    def generation(self) -> None:
        """Build up to N offspring from archive parents, stopping early on budget."""
        N = self.cfg.population_size
        items = self.archive.items()
        offspring: list[RingSolution] = []
        while len(offspring) < N:
            if self.tracker.exhausted:
                break
            a = decode(items[int(self.rng.integers(len(items)))], self.inst)
            b = decode(items[int(self.rng.integers(len(items)))], self.inst)
            both = N - len(offspring) >= 2
            for child in breed_pair(a, b, self.inst, self.cfg.mix, self.rng, both):
                if self.tracker.exhausted:
                    break
                self.tracker.charge()
                self._offer(child)
                offspring.append(child)
        if offspring:
            self.population = offspring
            self.generations += 1


def seea_run(inst: Instance, cfg: AlgoConfig, budget: Budget, seed: int) -> RunRecord:
    rng = np.random.default_rng(seed)
    tracker = BudgetTracker(budget)
    engine = SEEA(inst, cfg, rng, tracker)
    engine.initialise()
    while not tracker.exhausted:
        engine.generation()
    return make_record("seea", inst, cfg, budget, seed, engine.archive, tracker)


__all__ = ["SEEA", "seea_run"]
