"""Random-keys representation, decoding and objective evaluation.

A genotype is a float array of length ``n``: visited nodes carry a key in
``[0, 1)``, unvisited nodes carry :data:`UNVISITED`, and the depot key is 0.
Sorting visited nodes by key gives the ring.

Ring cost conventions for tiny rings: a depot-only ring costs 0 and a
two-node ring traverses its single edge twice.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ringstar.instance import DEPOT, Instance

UNVISITED = -1.0
BRUTE_FORCE_MAX_N = 10


class ContractError(ValueError):
    """An operation was called with arguments violating its preconditions."""


class OracleSizeError(ValueError):
    """The exhaustive oracle refuses instances above its size guard."""


Genotype = np.ndarray


@dataclass(frozen=True, eq=False)
class RingSolution:
    keys: np.ndarray
    ring: tuple[int, ...]
    # nearest ring node of every node; ring nodes map to themselves
    assignment: tuple[int, ...]
    f1: int
    f2: int

    @property
    def objectives(self) -> tuple[int, int]:
        return (self.f1, self.f2)

    @property
    def n(self) -> int:
        return len(self.assignment)

    def is_visited(self, v: int) -> bool:
        return self.assignment[v] == v

    def unvisited(self) -> list[int]:
        return [u for u, a in enumerate(self.assignment) if a != u]

    @cached_property
    def ring_array(self) -> np.ndarray:
        return np.asarray(self.ring, dtype=np.int64)

    @cached_property
    def assign_array(self) -> np.ndarray:
        return np.asarray(self.assignment, dtype=np.int64)

    @cached_property
    def pos_array(self) -> np.ndarray:
        pos = np.full(len(self.assignment), -1, dtype=np.int64)
        pos[self.ring_array] = np.arange(len(self.ring))
        return pos


def validate_genotype(keys: np.ndarray, n: int | None = None) -> None:
    keys = np.asarray(keys)
    if keys.ndim != 1 or (n is not None and keys.shape[0] != n):
        raise ContractError(f"genotype must be a flat array of length {n}")
    if keys[DEPOT] != 0.0:
        raise ContractError("depot key must be 0")
    vis = keys[keys != UNVISITED]
    if np.any(vis < 0.0) or np.any(vis >= 1.0):
        raise ContractError("visited keys must lie in [0, 1)")
    if np.unique(vis).size != vis.size:
        raise ContractError("two visited nodes share a key")


def ring_cost(ring: tuple[int, ...] | list[int], inst: Instance) -> int:
    c = inst.ring_cost
    L = len(ring)
    return int(sum(c[ring[k], ring[(k + 1) % L]] for k in range(L)))


def assign_nearest(ring: tuple[int, ...] | list[int], inst: Instance) -> tuple[int, ...]:
    """Nearest ring node (smallest index on ties) for every node."""
    members = np.sort(np.asarray(ring, dtype=np.int64))
    sub = inst.assign_cost[:, members]
    nearest = members[np.argmin(sub, axis=1)]
    nearest[members] = members
    return tuple(int(v) for v in nearest)


def evaluate(ring: tuple[int, ...] | list[int], inst: Instance) -> tuple[int, int]:
    """Full recomputation of ``(ring cost, assignment cost)``."""
    if len(ring) == 0 or ring[0] != DEPOT:
        raise ContractError("ring must start at the depot")
    if len(set(ring)) != len(ring):
        raise ContractError("ring contains duplicates")
    nearest = assign_nearest(ring, inst)
    d = inst.assign_cost
    f2 = int(sum(d[u, a] for u, a in enumerate(nearest)))
    return ring_cost(ring, inst), f2


def decode(keys: Genotype, inst: Instance) -> RingSolution:
    keys = np.asarray(keys, dtype=float)
    validate_genotype(keys, inst.n)
    vis = np.flatnonzero(keys != UNVISITED)
    ring = tuple(int(v) for v in vis[np.argsort(keys[vis], kind="stable")])
    nearest = assign_nearest(ring, inst)
    d = inst.assign_cost
    f2 = int(sum(d[u, a] for u, a in enumerate(nearest)))
    return RingSolution(keys.copy(), ring, nearest, ring_cost(ring, inst), f2)


def encode(ring: tuple[int, ...] | list[int], n: int) -> Genotype:
    """Evenly spaced keys reproducing ``ring`` under :func:`decode`."""
    keys = np.full(n, UNVISITED)
    L = len(ring)
    for k, v in enumerate(ring):
        keys[v] = k / L
    return keys


def solution_from_ring(ring: tuple[int, ...] | list[int], inst: Instance) -> RingSolution:
    return decode(encode(ring, inst.n), inst)


def random_solution(inst: Instance, rng: np.random.Generator) -> Genotype:
    """Visit every non-depot node with probability 0.5 and give it a uniform key.

    Draws ``n - 1`` visit coins, then ``n - 1`` keys, in that order.
    """
    n = inst.n
    visit = rng.random(n - 1) < 0.5
    raw = rng.random(n - 1)
    keys = np.full(n, UNVISITED)
    keys[DEPOT] = 0.0
    keys[1:][visit] = raw[visit]
    vis = keys[keys != UNVISITED]
    if np.unique(vis).size != vis.size:
        # float collisions are astronomically rare; fall back to a clean spacing
        keys = encode(decode_order(keys), n)
    return keys


def decode_order(keys: Genotype) -> tuple[int, ...]:
    vis = np.flatnonzero(keys != UNVISITED)
    return tuple(int(v) for v in vis[np.lexsort((vis, keys[vis]))])


def apply_insert(s: RingSolution, v: int, inst: Instance) -> RingSolution:
    """Insert unvisited ``v`` at the cheapest ring position (earliest on ties)."""
    if s.assignment[v] == v:
        raise ContractError(f"node {v} is already visited")
    c, d = inst.ring_cost, inst.assign_cost
    ring = s.ring
    L = len(ring)
    best_k, best = 0, None
    for k in range(L):
        a, b = ring[k], ring[(k + 1) % L]
        delta = int(c[a, v] + c[v, b] - c[a, b])
        if best is None or delta < best:
            best_k, best = k, delta
    new_ring = ring[: best_k + 1] + (v,) + ring[best_k + 1:]

    keys = s.keys.copy()
    lo = keys[ring[best_k]]
    hi = keys[ring[best_k + 1]] if best_k + 1 < L else 1.0
    mid = (lo + hi) / 2.0
    if lo < mid < hi:
        keys[v] = mid
    else:
        keys = encode(new_ring, s.n)

    assign = list(s.assignment)
    f2 = s.f2 - int(d[v, assign[v]])
    assign[v] = v
    for u, a in enumerate(assign):
        if a == u:
            continue
        if d[u, v] < d[u, a] or (d[u, v] == d[u, a] and v < a):
            f2 += int(d[u, v] - d[u, a])
            assign[u] = v
    return RingSolution(keys, new_ring, tuple(assign), s.f1 + best, f2)


def apply_remove(s: RingSolution, v: int, inst: Instance) -> RingSolution:
    """Splice ``v`` out of the ring and reassign the nodes it served."""
    if v == DEPOT:
        raise ContractError("the depot cannot be removed")
    if s.assignment[v] != v:
        raise ContractError(f"node {v} is not visited")
    c, d = inst.ring_cost, inst.assign_cost
    ring = s.ring
    L = len(ring)
    p = ring.index(v)
    prev, nxt = ring[p - 1], ring[(p + 1) % L]
    f1 = s.f1 + int(c[prev, nxt] - c[prev, v] - c[v, nxt])
    new_ring = ring[:p] + ring[p + 1:]

    members = sorted(new_ring)
    assign = list(s.assignment)
    f2 = s.f2
    for u, a in enumerate(s.assignment):
        if a != v:
            continue
        best = min(members, key=lambda w: (d[u, w], w))
        f2 += int(d[u, best] - d[u, v])
        assign[u] = best
    keys = s.keys.copy()
    keys[v] = UNVISITED
    return RingSolution(keys, new_ring, tuple(assign), f1, f2)


def apply_two_opt(s: RingSolution, i: int, j: int, inst: Instance) -> RingSolution:
    """Reverse ring positions ``i..j`` (0-based, depot at position 0 never moves)."""
    L = len(s.ring)
    if not 1 <= i <= j <= L - 1:
        raise ContractError(f"2-opt positions ({i}, {j}) out of range for a ring of {L}")
    if i == j:
        return s
    c = inst.ring_cost
    ring = s.ring
    a, b, x, y = ring[i - 1], ring[i], ring[j], ring[(j + 1) % L]
    delta = int(c[a, x] + c[b, y] - c[a, b] - c[x, y])
    segment = ring[i: j + 1]
    new_ring = ring[:i] + segment[::-1] + ring[j + 1:]
    keys = s.keys.copy()
    seg_keys = [s.keys[u] for u in segment]  # ascending by construction
    for t, u in enumerate(segment[::-1]):
        keys[u] = seg_keys[t]
    return RingSolution(keys, new_ring, s.assignment, s.f1 + delta, s.f2)


@dataclass(frozen=True)
class FrontPoint:
    f1: int
    f2: int
    ring: tuple[int, ...]


def brute_force_front(inst: Instance) -> list[FrontPoint]:
    """Exact non-dominated front by enumerating every ring through the depot.

    Each subset containing the depot is toured in every order with the depot
    first; mirror images are skipped. Returns one witness ring per point,
    sorted by ring cost.
    """
    n = inst.n
    if n > BRUTE_FORCE_MAX_N:
        raise OracleSizeError(f"exhaustive enumeration refused for n={n} > {BRUTE_FORCE_MAX_N}")
    c, d = inst.ring_cost, inst.assign_cost
    others = list(range(1, n))
    best: dict[tuple[int, ...], tuple[int, int, tuple[int, ...]]] = {}
    for size in range(0, n):
        for subset in itertools.combinations(others, size):
            members = (DEPOT,) + subset
            outside = [u for u in range(n) if u not in members]
            f2 = int(d[np.ix_(outside, members)].min(axis=1).sum()) if outside else 0
            if size == 0:
                f1, ring = 0, (DEPOT,)
            elif size == 1:
                f1, ring = int(2 * c[DEPOT, subset[0]]), members
            else:
                perms = np.array(list(itertools.permutations(subset)), dtype=np.int64)
                perms = perms[perms[:, 0] < perms[:, -1]]
                cost = c[DEPOT, perms[:, 0]] + c[perms[:, -1], DEPOT]
                cost = cost + c[perms[:, :-1], perms[:, 1:]].sum(axis=1)
                k = int(np.argmin(cost))
                f1, ring = int(cost[k]), (DEPOT,) + tuple(int(v) for v in perms[k])
            best[members] = (f1, f2, ring)

    cands = sorted(best.values(), key=lambda t: (t[0], t[1]))
    front: list[FrontPoint] = []
    for f1, f2, ring in cands:
        if not front or f2 < front[-1].f2:
            front.append(FrontPoint(f1, f2, ring))
    return front
