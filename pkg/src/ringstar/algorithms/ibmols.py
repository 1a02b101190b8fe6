"""Indicator-based multi-objective local search, plain and iterated.

The search loop itself is compiled (see ``_kernels``); this module moves
populations and archives in and out of it and enforces the run budget.
Archive items throughout the algorithms are genotypes (key arrays).
"""

from __future__ import annotations

import math
import sys

import numpy as np

from ringstar.algorithms import _kernels as K
from ringstar.algorithms.common import make_record
from ringstar.algorithms.config import EVALS, AlgoConfig, Budget, BudgetTracker, RunRecord
from ringstar.core import RingSolution, decode, random_solution
from ringstar.instance import Instance
from ringstar.pareto import Archive


class LSState:
    """A local search population held as row arrays."""

    def __init__(self, inst: Instance, keys: list[np.ndarray]) -> None:
        if len(keys) < 2:
            raise ValueError("local search population needs at least two members")
        N, n = len(keys), inst.n
        self.inst = inst
        self.ring = np.zeros((N, n), dtype=np.int64)
        self.length = np.zeros(N, dtype=np.int64)
        self.pos = np.zeros((N, n), dtype=np.int64)
        self.assign = np.zeros((N, n), dtype=np.int64)
        self.keys = np.zeros((N, n))
        self.objs = np.zeros((N, 2), dtype=np.int64)
        for m, g in enumerate(keys):
            K.load_member(self.ring, self.length, self.pos, self.assign, self.keys, self.objs, m,
                          np.asarray(g, dtype=float), inst.ring_cost, inst.assign_cost)

    def __len__(self) -> int:
        return self.ring.shape[0]

    @property
    def rows(self) -> tuple[np.ndarray, ...]:
        return self.ring, self.length, self.pos, self.assign, self.keys, self.objs

    def member(self, m: int) -> RingSolution:
        return decode(self.keys[m], self.inst)

    def members(self) -> list[RingSolution]:
        return [self.member(m) for m in range(len(self))]


class ArchiveBuffer:
    """Array copy of an :class:`Archive` for the compiled loop."""

    def __init__(self, archive: Archive, n: int) -> None:
        size = len(archive)
        cap = max(8, 2 * size)
        self.vectors = np.zeros((cap, 2), dtype=np.int64)
        self.keys = np.zeros((cap, n))
        if size:
            self.vectors[:size] = archive.vectors()
            self.keys[:size] = np.stack(archive.items())
        self.size = size

    def store(self, archive: Archive) -> None:
        archive.reset(self.vectors[: self.size].tolist(), [k.copy() for k in self.keys[: self.size]])


def random_population(inst: Instance, size: int, rng: np.random.Generator) -> list[RingSolution]:
    return [decode(random_solution(inst, rng), inst) for _ in range(size)]


def offer_all(archive: Archive, members: list[RingSolution]) -> bool:
    changed = False
    for s in members:
        changed |= archive.update(s.objectives, s.keys)
    return changed


def _max_steps(tracker: BudgetTracker) -> int:
    # wall-clock runs come back after every step to look at the clock
    return sys.maxsize if tracker.budget.mode == EVALS else 1


def ibmols_step(state: LSState, archive: Archive, cfg: AlgoConfig, rng: np.random.Generator,
                tracker: BudgetTracker) -> bool:
    """One pass over the population; ``state`` and ``archive`` change in place.

    Returns whether the archive changed.
    """
    inst = state.inst
    buf = ArchiveBuffer(archive, inst.n)
    buf.vectors, buf.keys, buf.size, used, changed = K.ls_step(
        *state.rows, buf.vectors, buf.keys, buf.size, inst.ring_cost, inst.assign_cost,
        cfg.kappa, rng, tracker.remaining_evals())
    tracker.charge(used)
    buf.store(archive)
    return bool(changed)


def _drive(state: LSState, archive: Archive, cfg: AlgoConfig, rng: np.random.Generator,
           tracker: BudgetTracker, iterated: bool) -> tuple[int, int]:
    inst = state.inst
    buf = ArchiveBuffer(archive, inst.n)
    mix = cfg.mix
    mutations = math.ceil(cfg.noise_rate * inst.n)
    steps = restarts = 0
    while not tracker.exhausted:
        buf.vectors, buf.keys, buf.size, used, s, r, finished = K.ls_run(
            *state.rows, buf.vectors, buf.keys, buf.size, inst.ring_cost, inst.assign_cost,
            cfg.kappa, rng, tracker.remaining_evals(), _max_steps(tracker), iterated, mutations,
            mix.w_remove, mix.w_insert, mix.w_two_opt)
        tracker.charge(used)
        steps += s
        restarts += r
        if finished:
            break
    buf.store(archive)
    return steps, restarts


def local_search(state: LSState, archive: Archive, cfg: AlgoConfig, rng: np.random.Generator,
                 tracker: BudgetTracker) -> int:
    """Steps until one leaves the archive unchanged; returns the step count."""
    return _drive(state, archive, cfg, rng, tracker, iterated=False)[0]


def ibmols_iterated(inst: Instance, cfg: AlgoConfig, budget: Budget, rng: np.random.Generator,
                    tracker: BudgetTracker | None = None) -> tuple[Archive, int]:
    """Local search with noise restarts until the budget runs out.

    Restarts mutate ``ceil(noise_rate * n)`` times each of N distinct
    archive members (all of them, topped up with random solutions, when
    the archive is smaller). Returns the archive and the restart count.
    """
    tracker = tracker or BudgetTracker(budget)
    archive: Archive = Archive()
    members = random_population(inst, cfg.population_size, rng)
    tracker.charge(len(members))
    offer_all(archive, members)
    state = LSState(inst, [s.keys for s in members])
    _, restarts = _drive(state, archive, cfg, rng, tracker, iterated=True)
    return archive, restarts


def run_ibmols(inst: Instance, cfg: AlgoConfig, budget: Budget, seed: int) -> RunRecord:
    rng = np.random.default_rng(seed)
    tracker = BudgetTracker(budget)
    archive, _ = ibmols_iterated(inst, cfg, budget, rng, tracker)
    return make_record("ibmols", inst, cfg, budget, seed, archive, tracker)
