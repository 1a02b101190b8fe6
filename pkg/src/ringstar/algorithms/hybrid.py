"""Cooperative schemes alternating the elitist EA with local search on one archive.

The periodic scheme launches local search at every step boundary. The
adaptive one launches it only when the archive has stalled, measured as the
contribution of the current archive against the one seen at the previous
boundary.
"""

from __future__ import annotations

import math

import numpy as np

from ringstar.algorithms.common import front_digest, make_record
from ringstar.algorithms.config import AlgoConfig, Budget, BudgetTracker, RunRecord
from ringstar.algorithms.ibmols import LSState, local_search, random_population
from ringstar.algorithms.seea import SEEA
from ringstar.indicators import contribution
from ringstar.instance import Instance
from ringstar.pareto import Archive

PCS, ACS = "pcs", "acs"


def ls_seeds(archive: Archive, inst: Instance, size: int, rng: np.random.Generator,
             tracker: BudgetTracker) -> list[np.ndarray]:
    """Distinct archive members drawn uniformly, plus random solutions if short."""
    items = archive.items()
    k = min(size, len(items))
    chosen = [items[i] for i in rng.choice(len(items), k, replace=False)]
    fills = random_population(inst, min(size - k, tracker.remaining_evals()), rng)
    tracker.charge(len(fills))
    for s in fills:
        archive.update(s.objectives, s.keys)
    return chosen + [s.keys for s in fills]


def cooperative_run(scheme: str, inst: Instance, cfg: AlgoConfig, budget: Budget,
                    seed: int) -> RunRecord:
    if scheme not in (PCS, ACS):
        raise ValueError(f"unknown cooperative scheme {scheme!r}")
    rng = np.random.default_rng(seed)
    tracker = BudgetTracker(budget)
    archive: Archive = Archive()
    engine = SEEA(inst, cfg, rng, tracker, archive)
    engine.initialise()

    step = budget.step(cfg.step_fraction)
    boundary = step
    snapshot = archive.vectors()
    launches = 0
    trace = []
    while not tracker.exhausted:
        engine.generation()
        if tracker.exhausted or tracker.progress < boundary:
            continue
        current = archive.vectors()
        c = contribution(current, snapshot)
        launch = scheme == PCS or c <= cfg.delta
        snapshot = current
        if launch:
            launches += 1
            seeds = ls_seeds(archive, inst, cfg.ls_population, rng, tracker)
            local_search(LSState(inst, seeds), archive, cfg, rng, tracker)
        trace.append({
            "evaluations": tracker.used,
            "archive_size": len(archive),
            "contribution": c,
            "launched": launch,
            "front_digest": front_digest(archive.vectors()),
        })
        boundary = (math.floor(tracker.progress / step) + 1) * step
    return make_record(scheme, inst, cfg, budget, seed, archive, tracker, launches, trace)


def pcs_run(inst: Instance, cfg: AlgoConfig, budget: Budget, seed: int) -> RunRecord:
    return cooperative_run(PCS, inst, cfg, budget, seed)


def acs_run(inst: Instance, cfg: AlgoConfig, budget: Budget, seed: int) -> RunRecord:
    return cooperative_run(ACS, inst, cfg, budget, seed)
