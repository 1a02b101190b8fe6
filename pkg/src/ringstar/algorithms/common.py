"""Pieces shared by the evolutionary algorithms and the hybrids."""

from __future__ import annotations

import hashlib
from typing import Any

import numpy as np

from ringstar.algorithms.config import AlgoConfig, Budget, BudgetTracker, RunRecord
from ringstar.core import RingSolution, UNVISITED, decode
from ringstar.instance import Instance
from ringstar.pareto import Archive
from ringstar.variation import OperatorMix, crossover, mutate_solution


def keys_list(keys: np.ndarray) -> list[float | None]:
    return [None if k == UNVISITED else float(k) for k in keys]


def make_record(algorithm: str, inst: Instance, cfg: AlgoConfig, budget: Budget, seed: int,
                archive: Archive, tracker: BudgetTracker, launches: int | None = None,
                trace: list[dict[str, Any]] | None = None) -> RunRecord:
    front = [(int(z[0]), int(z[1]), keys_list(g)) for z, g in archive]
    return RunRecord(
        algorithm=algorithm, instance=inst.name, seed=seed, config=cfg, budget=budget,
        evaluations=tracker.used, elapsed_seconds=tracker.elapsed, front=front,
        cost_model=str(inst.cost_model), launches_ls=launches, trace=trace or [],
    )


def front_digest(vectors: list[tuple[int, int]]) -> str:
    text = ";".join(f"{a},{b}" for a, b in vectors)
    return hashlib.sha1(text.encode()).hexdigest()[:16]


def breed_pair(p1: RingSolution, p2: RingSolution, inst: Instance, mix: OperatorMix,
               rng: np.random.Generator, both: bool = True) -> list[RingSolution]:
    """Crossover (with its probability) then mutation of each child.

    Draw order: crossover coin, cut, then each child's mutation draws.
    With ``both`` false only the first child is mutated and returned.
    """
    if rng.random() < mix.p_crossover:
        g1, g2 = crossover(p1.keys, p2.keys, rng)
        children = [decode(g1, inst), decode(g2, inst)]
    else:
        children = [p1, p2]
    if not both:
        children = children[:1]
    return [mutate_solution(c, inst, mix, rng) for c in children]
