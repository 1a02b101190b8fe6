"""Additive epsilon indicators, indicator-based fitness, hypervolume and contribution."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ringstar.pareto import NormBounds, nondominated, normalize_array

DEFAULT_KAPPA = 0.05


def eps_binary(x: Sequence[float], xp: Sequence[float]) -> float:
    """Smallest translation of ``x`` that makes it weakly dominate ``xp``."""
    return max(x[0] - xp[0], x[1] - xp[1])


def eps_matrix(points: np.ndarray) -> np.ndarray:
    """``M[a, b] = eps_binary(points[a], points[b])``."""
    p = np.asarray(points, dtype=float)
    return np.max(p[:, None, :] - p[None, :, :], axis=2)


@dataclass(frozen=True)
class FitnessContext:
    population: np.ndarray
    kappa: float = DEFAULT_KAPPA

    def __post_init__(self) -> None:
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")


def fitness_all(points: np.ndarray, kappa: float = DEFAULT_KAPPA) -> np.ndarray:
    """Fitness of every member: sum over the others of ``-exp(-eps(other, member) / kappa)``.

    Higher is better. ``points`` must already be normalised.
    """
    m = eps_matrix(points)
    contrib = -np.exp(-m / kappa)
    np.fill_diagonal(contrib, 0.0)
    return contrib.sum(axis=0)


def fitness(i: int, ctx: FitnessContext) -> float:
    p = np.asarray(ctx.population, dtype=float)
    total = 0.0
    for j in range(p.shape[0]):
        if j != i:
            total -= np.exp(-eps_binary(p[j], p[i]) / ctx.kappa)
    return float(total)


def eps_unary_set(A: Iterable[Sequence[float]], R: Iterable[Sequence[float]], bounds: NormBounds) -> float:
    """Additive epsilon by which ``A`` must be shifted to weakly dominate ``R``."""
    a = normalize_array(np.asarray(list(A), dtype=float), bounds)
    r = normalize_array(np.asarray(list(R), dtype=float), bounds)
    if a.shape[0] == 0 or r.shape[0] == 0:
        raise ValueError("epsilon indicator of an empty set")
    diff = np.max(a[:, None, :] - r[None, :, :], axis=2)
    return float(np.max(np.min(diff, axis=0)))


def hypervolume_2d(S: Iterable[Sequence[float]], ref: Sequence[float]) -> float:
    """Area dominated by ``S`` and bounded by ``ref`` (minimisation)."""
    pts = sorted((float(a), float(b)) for a, b in S if a < ref[0] and b < ref[1])
    area = 0.0
    best_f2 = float(ref[1])
    for x, y in pts:
        if y >= best_f2:
            continue
        # horizontal strip [x, ref0] x [y, best_f2)
        area += (ref[0] - x) * (best_f2 - y)
        best_f2 = y
    return area


def hv_difference(A: Iterable[Sequence[float]], Zref: Iterable[Sequence[float]], ref: Sequence[float]) -> float:
    return hypervolume_2d(Zref, ref) - hypervolume_2d(A, ref)


def contribution(S1: Iterable[Sequence[int]], S2: Iterable[Sequence[int]]) -> float:
    """Share of the merged non-dominated set coming from ``S1``; shared points count half."""
    a = {(int(x), int(y)) for x, y in S1}
    b = {(int(x), int(y)) for x, y in S2}
    if not a or not b:
        raise ValueError("contribution needs two non-empty sets")
    merged = nondominated(a | b)
    only_a = sum(1 for z in merged if z in a and z not in b)
    both = sum(1 for z in merged if z in a and z in b)
    return (only_a + 0.5 * both) / len(merged)
