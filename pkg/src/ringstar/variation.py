"""Mutation, crossover and neighbourhood enumeration on top of the ring moves."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, NamedTuple

import numpy as np

from ringstar.core import (
    UNVISITED,
    Genotype,
    RingSolution,
    apply_insert,
    apply_remove,
    apply_two_opt,
    decode,
    decode_order,
    encode,
)
from ringstar.instance import Instance

INSERT, REMOVE, TWO_OPT = 0, 1, 2
MOVE_NAMES = {INSERT: "insert", REMOVE: "remove", TWO_OPT: "two_opt"}


@dataclass(frozen=True)
class OperatorMix:
    p_crossover: float = 0.25
    p_mutation: float = 1.0
    w_remove: float = 0.25
    w_insert: float = 0.25
    w_two_opt: float = 0.50

    def __post_init__(self) -> None:
        for name in ("p_crossover", "p_mutation", "w_remove", "w_insert", "w_two_opt"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if abs(self.w_remove + self.w_insert + self.w_two_opt - 1.0) > 1e-12:
            raise ValueError("operator weights must sum to 1")


class Move(NamedTuple):
    """``a``/``b`` are a node for insert/remove, ring positions for 2-opt."""

    kind: int
    a: int
    b: int = -1

    def __str__(self) -> str:
        if self.kind == TWO_OPT:
            return f"two_opt({self.a},{self.b})"
        return f"{MOVE_NAMES[self.kind]}({self.a})"


@lru_cache(maxsize=None)
def two_opt_pairs(L: int) -> np.ndarray:
    """Ring position pairs ``(i, j)``, ``1 <= i < j <= L-1``, that change the cycle.

    Reversing every non-depot position only mirrors the cycle, so that pair is left out.
    """
    if L < 4:
        return np.empty((0, 2), dtype=np.int64)
    i, j = np.triu_indices(L - 1, k=1)
    pairs = np.column_stack((i + 1, j + 1)).astype(np.int64)
    keep = ~((pairs[:, 0] == 1) & (pairs[:, 1] == L - 1))
    pairs = pairs[keep]
    pairs.setflags(write=False)
    return pairs


def enumerate_moves(s: RingSolution) -> np.ndarray:
    """All neighbourhood moves of ``s`` as rows ``(kind, a, b)`` in canonical order."""
    assign = s.assign_array
    nodes = np.arange(assign.shape[0], dtype=np.int64)
    unvisited = nodes[assign != nodes]
    removable = nodes[(assign == nodes) & (nodes != 0)]
    pairs = two_opt_pairs(len(s.ring))
    moves = np.empty((unvisited.size + removable.size + pairs.shape[0], 3), dtype=np.int64)
    k = unvisited.size
    moves[:k, 0], moves[:k, 1], moves[:k, 2] = INSERT, unvisited, -1
    moves[k:k + removable.size, 0] = REMOVE
    moves[k:k + removable.size, 1] = removable
    moves[k:k + removable.size, 2] = -1
    k += removable.size
    moves[k:, 0] = TWO_OPT
    moves[k:, 1:] = pairs
    return moves


def neighborhood_order(s: RingSolution, rng: np.random.Generator) -> np.ndarray:
    moves = enumerate_moves(s)
    return moves[rng.permutation(moves.shape[0])]


def apply_move(s: RingSolution, move: Move | tuple | np.ndarray, inst: Instance) -> RingSolution:
    kind, a, b = (int(x) for x in move)
    if kind == INSERT:
        return apply_insert(s, a, inst)
    if kind == REMOVE:
        return apply_remove(s, a, inst)
    return apply_two_opt(s, a, b, inst)


def neighborhood_stream(s: RingSolution, inst: Instance,
                        rng: np.random.Generator) -> Iterator[tuple[Move, RingSolution]]:
    """Every insert/remove/2-opt neighbour exactly once, in a random interleaved order."""
    for row in neighborhood_order(s, rng):
        move = Move(int(row[0]), int(row[1]), int(row[2]))
        yield move, apply_move(s, move, inst)


def mutate_solution(s: RingSolution, inst: Instance, mix: OperatorMix,
                    rng: np.random.Generator) -> RingSolution:
    """Apply one randomly drawn operator to random targets.

    Draw order: mutation coin, operator, target. The operator is drawn by
    weight among the applicable ones only, which matches redrawing on an
    inapplicable pick.
    """
    if rng.random() >= mix.p_mutation:
        return s
    L = len(s.ring)
    options = []
    if L >= 2:
        options.append((REMOVE, mix.w_remove))
    if L < s.n:
        options.append((INSERT, mix.w_insert))
    if L >= 4:
        options.append((TWO_OPT, mix.w_two_opt))
    total = sum(w for _, w in options)
    if not options or total <= 0.0:
        return s
    u = rng.random() * total
    kind = options[-1][0]
    for k, w in options:
        if u < w:
            kind = k
            break
        u -= w

    if kind == REMOVE:
        v = s.ring[1 + int(rng.integers(L - 1))]
        return apply_remove(s, v, inst)
    if kind == INSERT:
        cand = s.unvisited()
        return apply_insert(s, cand[int(rng.integers(len(cand)))], inst)
    pairs = two_opt_pairs(L)
    i, j = pairs[int(rng.integers(pairs.shape[0]))]
    return apply_two_opt(s, int(i), int(j), inst)


def mutate(g: Genotype, inst: Instance, mix: OperatorMix, rng: np.random.Generator) -> Genotype:
    return mutate_solution(decode(g, inst), inst, mix, rng).keys


def repair_keys(keys: Genotype) -> Genotype:
    """Make visited keys strictly increasing in (key, node) order.

    A node whose key collides with the previous one is nudged to the next
    representable float above it; if that reaches 1, all keys are re-spaced.
    """
    order = decode_order(keys)
    vals = keys[list(order)]
    if np.all(np.diff(vals) > 0):
        return keys
    keys = keys.copy()
    prev = -np.inf
    for v in order:
        k = keys[v]
        if k <= prev:
            k = np.nextafter(prev, 1.0)
            if k >= 1.0:
                return encode(order, keys.shape[0])
            keys[v] = k
        prev = k
    return keys


def crossover(g1: Genotype, g2: Genotype, rng: np.random.Generator,
              cut: int | None = None) -> tuple[Genotype, Genotype]:
    """One-point crossover over node indices; every node keeps its key.

    ``cut`` is the number of leading nodes taken from the first parent
    (drawn uniformly in ``1..n-1`` when omitted).
    """
    n = g1.shape[0]
    if g2.shape[0] != n:
        raise ValueError("parents differ in length")
    k = int(rng.integers(1, n)) if cut is None else cut
    if not 1 <= k <= n - 1:
        raise ValueError(f"cut must lie in 1..{n - 1}")
    c1 = np.concatenate((g1[:k], g2[k:]))
    c2 = np.concatenate((g2[:k], g1[k:]))
    return repair_keys(c1), repair_keys(c2)


__all__ = [
    "INSERT", "REMOVE", "TWO_OPT", "UNVISITED", "Move", "OperatorMix", "apply_move", "crossover",
    "enumerate_moves", "mutate", "mutate_solution", "neighborhood_order", "neighborhood_stream",
    "repair_keys", "two_opt_pairs",
]
