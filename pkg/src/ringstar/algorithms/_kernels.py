"""Compiled local search engine.

A population is held as row arrays: ``RING[m, :LEN[m]]`` is the ring of
member ``m``, ``POS`` maps node to ring position (-1 when unvisited),
``ASG`` is the assignment, ``KEY`` the genotype and ``OBJ`` the objectives.
The archive is a pair of arrays sorted by ``f1`` (vectors and keys) with a
separate size, grown by doubling.

Row operations mirror the reference moves in :mod:`ringstar.core` and
draw from the run's generator in the same order as their Python
counterparts, so both routes give identical results from the same seed.
"""

from __future__ import annotations

import numpy as np
from numba import njit

INSERT, REMOVE, TWO_OPT = 0, 1, 2
UNVISITED = -1.0
BIG = np.int64(1) << 62


# ---- objective deltas of a move, without applying it ----

@njit(cache=True)
def insert_objectives(ring, pos, assign, C, D, v, f1, f2):
    L = ring.shape[0]
    best = BIG
    for k in range(L):
        a = ring[k]
        b = ring[(k + 1) % L]
        d = C[a, v] + C[v, b] - C[a, b]
        if d < best:
            best = d
    nf2 = f2 - D[v, assign[v]]
    for u in range(pos.shape[0]):
        if pos[u] < 0 and u != v:
            diff = D[u, v] - D[u, assign[u]]
            if diff < 0:
                nf2 += diff
    return f1 + best, nf2


@njit(cache=True)
def remove_objectives(ring, pos, assign, C, D, v, f1, f2):
    L = ring.shape[0]
    p = pos[v]
    prev = ring[p - 1]
    nxt = ring[(p + 1) % L]
    nf1 = f1 + C[prev, nxt] - C[prev, v] - C[v, nxt]
    nf2 = f2
    for u in range(pos.shape[0]):
        if assign[u] != v:
            continue
        best = BIG
        for k in range(L):
            w = ring[k]
            if w != v and D[u, w] < best:
                best = D[u, w]
        nf2 += best - D[u, v]
    return nf1, nf2


@njit(cache=True)
def two_opt_objectives(ring, C, i, j, f1, f2):
    L = ring.shape[0]
    a = ring[i - 1]
    b = ring[i]
    x = ring[j]
    y = ring[(j + 1) % L]
    return f1 + C[a, x] + C[b, y] - C[a, b] - C[x, y], f2


@njit(cache=True)
def move_objectives(ring, pos, assign, C, D, kind, a, b, f1, f2):
    if kind == INSERT:
        return insert_objectives(ring, pos, assign, C, D, a, f1, f2)
    if kind == REMOVE:
        return remove_objectives(ring, pos, assign, C, D, a, f1, f2)
    return two_opt_objectives(ring, C, a, b, f1, f2)


# ---- in-place row moves; each returns the new (L, f1, f2) ----

@njit(cache=True)
def row_insert(ring, pos, asg, keys, L, f1, f2, C, D, v):
    best_k = 0
    best = BIG
    for k in range(L):
        a = ring[k]
        b = ring[(k + 1) % L]
        d = C[a, v] + C[v, b] - C[a, b]
        if d < best:
            best = d
            best_k = k
    lo = keys[ring[best_k]]
    hi = keys[ring[best_k + 1]] if best_k + 1 < L else 1.0
    for t in range(L, best_k + 1, -1):
        ring[t] = ring[t - 1]
        pos[ring[t]] = t
    ring[best_k + 1] = v
    pos[v] = best_k + 1
    L += 1
    mid = (lo + hi) / 2.0
    if lo < mid < hi:
        keys[v] = mid
    else:
        for t in range(L):
            keys[ring[t]] = t / L
    f2 -= D[v, asg[v]]
    asg[v] = v
    for u in range(pos.shape[0]):
        if pos[u] >= 0:
            continue
        a = asg[u]
        if D[u, v] < D[u, a] or (D[u, v] == D[u, a] and v < a):
            f2 += D[u, v] - D[u, a]
            asg[u] = v
    return L, f1 + best, f2


@njit(cache=True)
def row_remove(ring, pos, asg, keys, L, f1, f2, C, D, v):
    p = pos[v]
    prev = ring[p - 1]
    nxt = ring[(p + 1) % L]
    f1 += C[prev, nxt] - C[prev, v] - C[v, nxt]
    for t in range(p, L - 1):
        ring[t] = ring[t + 1]
        pos[ring[t]] = t
    L -= 1
    pos[v] = -1
    keys[v] = UNVISITED
    for u in range(pos.shape[0]):
        if asg[u] != v:
            continue
        best = -1
        bd = BIG
        for k in range(L):
            w = ring[k]
            if D[u, w] < bd or (D[u, w] == bd and w < best):
                bd = D[u, w]
                best = w
        f2 += bd - D[u, v]
        asg[u] = best
    return L, f1, f2


@njit(cache=True)
def row_two_opt(ring, pos, asg, keys, L, f1, f2, C, D, i, j):
    if i == j:
        return L, f1, f2
    a = ring[i - 1]
    b = ring[i]
    x = ring[j]
    y = ring[(j + 1) % L]
    f1 += C[a, x] + C[b, y] - C[a, b] - C[x, y]
    ks = np.empty(j - i + 1)
    for t in range(i, j + 1):
        ks[t - i] = keys[ring[t]]
    lo, hi = i, j
    while lo < hi:
        tmp = ring[lo]
        ring[lo] = ring[hi]
        ring[hi] = tmp
        lo += 1
        hi -= 1
    for t in range(i, j + 1):
        pos[ring[t]] = t
        keys[ring[t]] = ks[t - i]
    return L, f1, f2


@njit(cache=True)
def row_apply(ring, pos, asg, keys, L, f1, f2, C, D, kind, a, b):
    if kind == INSERT:
        return row_insert(ring, pos, asg, keys, L, f1, f2, C, D, a)
    if kind == REMOVE:
        return row_remove(ring, pos, asg, keys, L, f1, f2, C, D, a)
    return row_two_opt(ring, pos, asg, keys, L, f1, f2, C, D, a, b)


# ---- decoding and random solutions ----

@njit(cache=True)
def row_decode(keys, ring, pos, asg, C, D):
    """Fill a row from a genotype; returns (L, f1, f2)."""
    n = keys.shape[0]
    vis = np.flatnonzero(keys != UNVISITED)
    order = np.argsort(keys[vis], kind="mergesort")
    L = vis.shape[0]
    pos[:] = -1
    for t in range(L):
        ring[t] = vis[order[t]]
        pos[ring[t]] = t
    f1 = 0
    for k in range(L):
        f1 += C[ring[k], ring[(k + 1) % L]]
    f2 = 0
    for u in range(n):
        if pos[u] >= 0:
            asg[u] = u
            continue
        best = -1
        bd = BIG
        for k in range(L):
            w = ring[k]
            if D[u, w] < bd or (D[u, w] == bd and w < best):
                bd = D[u, w]
                best = w
        asg[u] = best
        f2 += bd
    return L, f1, f2


@njit(cache=True)
def random_keys(n, rng):
    """Same draws as :func:`ringstar.core.random_solution`."""
    visit = rng.random(n - 1) < 0.5
    raw = rng.random(n - 1)
    keys = np.full(n, UNVISITED)
    keys[0] = 0.0
    for u in range(1, n):
        if visit[u - 1]:
            keys[u] = raw[u - 1]
    vis = np.flatnonzero(keys != UNVISITED)
    order = np.argsort(keys[vis], kind="mergesort")
    for t in range(1, vis.shape[0]):
        if keys[vis[order[t]]] == keys[vis[order[t - 1]]]:
            L = vis.shape[0]
            for s in range(L):
                keys[vis[order[s]]] = s / L
            break
    return keys


# ---- mutation ----

@njit(cache=True)
def two_opt_pair(L, idx):
    """The ``idx``-th useful 2-opt pair in row-major order."""
    k = 0
    for i in range(1, L - 1):
        for j in range(i + 1, L):
            if i == 1 and j == L - 1:
                continue
            if k == idx:
                return i, j
            k += 1
    return -1, -1


@njit(cache=True)
def row_mutate(ring, pos, asg, keys, L, f1, f2, C, D, rng, p_mut, w_remove, w_insert, w_two_opt):
    """Same draws and effect as :func:`ringstar.variation.mutate_solution`."""
    n = pos.shape[0]
    if rng.random() >= p_mut:
        return L, f1, f2
    kinds = np.empty(3, dtype=np.int64)
    weights = np.empty(3)
    m = 0
    if L >= 2:
        kinds[m] = REMOVE
        weights[m] = w_remove
        m += 1
    if L < n:
        kinds[m] = INSERT
        weights[m] = w_insert
        m += 1
    if L >= 4:
        kinds[m] = TWO_OPT
        weights[m] = w_two_opt
        m += 1
    total = 0.0
    for t in range(m):
        total += weights[t]
    if m == 0 or total <= 0.0:
        return L, f1, f2
    u = rng.random() * total
    kind = kinds[m - 1]
    for t in range(m):
        if u < weights[t]:
            kind = kinds[t]
            break
        u -= weights[t]
    if kind == REMOVE:
        v = ring[1 + rng.integers(0, L - 1)]
        return row_remove(ring, pos, asg, keys, L, f1, f2, C, D, v)
    if kind == INSERT:
        cand = np.flatnonzero(pos < 0)
        v = cand[rng.integers(0, cand.shape[0])]
        return row_insert(ring, pos, asg, keys, L, f1, f2, C, D, v)
    npairs = (L - 1) * (L - 2) // 2 - 1
    i, j = two_opt_pair(L, rng.integers(0, npairs))
    return row_two_opt(ring, pos, asg, keys, L, f1, f2, C, D, i, j)


# ---- neighbourhood ----

@njit(cache=True)
def row_moves(ring, L, pos):
    """Moves in canonical order: inserts, removes (by node), then 2-opt pairs."""
    n = pos.shape[0]
    npairs = (L - 1) * (L - 2) // 2 - 1 if L >= 4 else 0
    moves = np.empty((n - 1 + npairs, 3), dtype=np.int64)
    k = 0
    for u in range(n):
        if pos[u] < 0:
            moves[k, 0] = INSERT
            moves[k, 1] = u
            moves[k, 2] = -1
            k += 1
    for u in range(1, n):
        if pos[u] >= 0:
            moves[k, 0] = REMOVE
            moves[k, 1] = u
            moves[k, 2] = -1
            k += 1
    if L >= 4:
        for i in range(1, L - 1):
            for j in range(i + 1, L):
                if i == 1 and j == L - 1:
                    continue
                moves[k, 0] = TWO_OPT
                moves[k, 1] = i
                moves[k, 2] = j
                k += 1
    return moves


# ---- archive ----

@njit(cache=True)
def archive_accepts(AF, size, f1, f2):
    """Whether a vector is neither dominated by nor equal to an archive entry."""
    k = np.searchsorted(AF[:size, 0], f1, side="right")
    return k == 0 or AF[k - 1, 1] > f2


@njit(cache=True)
def archive_insert(AF, AK, size, f1, f2, keys):
    """Offer a point; returns (AF, AK, size, inserted), arrays possibly regrown.

    A point equal to a stored one is rejected, so the first one seen stays.
    """
    k = np.searchsorted(AF[:size, 0], f1, side="right")
    if k > 0 and AF[k - 1, 1] <= f2:
        return AF, AK, size, False
    j = k
    while j < size and AF[j, 1] >= f2:
        j += 1
    start = k
    while start > 0 and AF[start - 1, 0] == f1:
        start -= 1
    new_size = size - (j - start) + 1
    if new_size > AF.shape[0]:
        cap = max(2 * AF.shape[0], new_size, 8)
        AF2 = np.empty((cap, 2), dtype=AF.dtype)
        AK2 = np.empty((cap, AK.shape[1]))
        AF2[:size] = AF[:size]
        AK2[:size] = AK[:size]
        AF, AK = AF2, AK2
    tail = size - j
    if j - start == 0:
        for t in range(tail - 1, -1, -1):
            AF[start + 1 + t] = AF[j + t]
            AK[start + 1 + t] = AK[j + t]
    else:
        for t in range(tail):
            AF[start + 1 + t] = AF[j + t]
            AK[start + 1 + t] = AK[j + t]
    AF[start, 0] = f1
    AF[start, 1] = f2
    AK[start] = keys
    return AF, AK, new_size, True


# ---- indicator-based replacement ----

@njit(cache=True)
def _lexmin(objs, first, second):
    best = 0
    for i in range(1, objs.shape[0]):
        if objs[i, first] < objs[best, first] or (
                objs[i, first] == objs[best, first] and objs[i, second] < objs[best, second]):
            best = i
    return best


@njit(cache=True)
def _normalise(objs, lo, hi):
    out = np.empty((objs.shape[0], 2))
    for k in range(2):
        span = hi[k] - lo[k]
        for i in range(objs.shape[0]):
            out[i, k] = 0.0 if span == 0 else (objs[i, k] - lo[k]) / span
    return out


@njit(cache=True)
def population_state(objs, kappa):
    """Bounds, normalised points, fitness values and the two protected extremes."""
    N = objs.shape[0]
    lo = np.empty(2)
    hi = np.empty(2)
    for k in range(2):
        lo[k] = objs[:, k].min()
        hi[k] = objs[:, k].max()
    norm = _normalise(objs, lo, hi)
    fit = np.zeros(N)
    for i in range(N):
        for j in range(N):
            if i != j:
                e = max(norm[j, 0] - norm[i, 0], norm[j, 1] - norm[i, 1])
                fit[i] -= np.exp(-e / kappa)
    return lo, hi, norm, fit, _lexmin(objs, 0, 1), _lexmin(objs, 1, 0)


@njit(cache=True)
def replacement_victim(x0, x1, objs, lo, hi, norm, fit, p1, p2, kappa):
    """Index of the member a candidate would replace, or -1 if it is rejected.

    The candidate competes in population + candidate. The two lexicographic
    extremes are never deleted (an existing member keeps its protection over
    an identical candidate). The candidate is accepted when it is protected
    or its fitness strictly exceeds the worst unprotected member's.
    """
    N = objs.shape[0]
    x_p1 = x0 < objs[p1, 0] or (x0 == objs[p1, 0] and x1 < objs[p1, 1])
    x_p2 = x1 < objs[p2, 1] or (x1 == objs[p2, 1] and x0 < objs[p2, 0])
    prot1 = -1 if x_p1 else p1
    prot2 = -1 if x_p2 else p2

    inside = lo[0] <= x0 <= hi[0] and lo[1] <= x1 <= hi[1]
    fx = 0.0
    worst = np.inf
    victim = -1
    if inside:
        # bounds unchanged: reuse the cached sums and add the candidate's terms
        s0 = hi[0] - lo[0]
        s1 = hi[1] - lo[1]
        xn0 = 0.0 if s0 == 0 else (x0 - lo[0]) / s0
        xn1 = 0.0 if s1 == 0 else (x1 - lo[1]) / s1
        for j in range(N):
            fx -= np.exp(-max(norm[j, 0] - xn0, norm[j, 1] - xn1) / kappa)
        for i in range(N):
            if i == prot1 or i == prot2:
                continue
            fi = fit[i] - np.exp(-max(xn0 - norm[i, 0], xn1 - norm[i, 1]) / kappa)
            if fi < worst:
                worst = fi
                victim = i
    else:
        allobjs = np.empty((N + 1, 2))
        allobjs[:N] = objs
        allobjs[N, 0] = x0
        allobjs[N, 1] = x1
        nlo = np.empty(2)
        nhi = np.empty(2)
        for k in range(2):
            nlo[k] = allobjs[:, k].min()
            nhi[k] = allobjs[:, k].max()
        an = _normalise(allobjs, nlo, nhi)
        for j in range(N):
            fx -= np.exp(-max(an[j, 0] - an[N, 0], an[j, 1] - an[N, 1]) / kappa)
        for i in range(N):
            if i == prot1 or i == prot2:
                continue
            fi = 0.0
            for j in range(N + 1):
                if j != i:
                    fi -= np.exp(-max(an[j, 0] - an[i, 0], an[j, 1] - an[i, 1]) / kappa)
            if fi < worst:
                worst = fi
                victim = i
    if victim < 0:
        return -1
    if not (x_p1 or x_p2) and fx <= worst:
        return -1
    return victim


# ---- search loops ----

@njit(cache=True)
def ls_step(RING, LEN, POS, ASG, KEY, OBJ, AF, AK, asize, C, D, kappa, rng, limit):
    """One pass over the population in member order.

    Each member's neighbourhood is shuffled and scanned until a neighbour
    enters the population. Neighbours that are accepted or new to the archive
    are built and offered to it. Returns (AF, AK, size, evaluations, changed).
    """
    N, n = RING.shape
    objs = OBJ.astype(np.float64)
    lo, hi, norm, fit, p1, p2 = population_state(objs, kappa)
    tr = np.empty(n, dtype=np.int64)
    tp = np.empty(n, dtype=np.int64)
    ta = np.empty(n, dtype=np.int64)
    tk = np.empty(n)
    used = 0
    changed = False
    for i in range(N):
        if used >= limit:
            break
        L = LEN[i]
        moves = row_moves(RING[i], L, POS[i])
        moves = moves[rng.permutation(moves.shape[0])]
        f1 = OBJ[i, 0]
        f2 = OBJ[i, 1]
        for t in range(moves.shape[0]):
            if used >= limit:
                break
            used += 1
            kind, a, b = moves[t, 0], moves[t, 1], moves[t, 2]
            nf1, nf2 = move_objectives(RING[i, :L], POS[i], ASG[i], C, D, kind, a, b, f1, f2)
            victim = replacement_victim(float(nf1), float(nf2), objs, lo, hi, norm, fit, p1, p2, kappa)
            if victim < 0 and not archive_accepts(AF, asize, nf1, nf2):
                continue
            tr[:] = RING[i]
            tp[:] = POS[i]
            ta[:] = ASG[i]
            tk[:] = KEY[i]
            L2, g1, g2 = row_apply(tr, tp, ta, tk, L, f1, f2, C, D, kind, a, b)
            AF, AK, asize, ins = archive_insert(AF, AK, asize, g1, g2, tk)
            changed = changed or ins
            if victim >= 0:
                RING[victim] = tr
                POS[victim] = tp
                ASG[victim] = ta
                KEY[victim] = tk
                LEN[victim] = L2
                OBJ[victim, 0] = g1
                OBJ[victim, 1] = g2
                objs[victim, 0] = g1
                objs[victim, 1] = g2
                lo, hi, norm, fit, p1, p2 = population_state(objs, kappa)
                break
    return AF, AK, asize, used, changed


@njit(cache=True)
def load_member(RING, LEN, POS, ASG, KEY, OBJ, m, keys, C, D):
    KEY[m] = keys
    L, f1, f2 = row_decode(KEY[m], RING[m], POS[m], ASG[m], C, D)
    LEN[m] = L
    OBJ[m, 0] = f1
    OBJ[m, 1] = f2


@njit(cache=True)
def noise_restart(RING, LEN, POS, ASG, KEY, OBJ, AF, AK, asize, C, D, rng, limit,
                  mutations, w_remove, w_insert, w_two_opt):
    """Refill the population from mutated archive members, then random solutions.

    N distinct members are drawn when the archive holds at least N, else all
    are used in archive order. At most ``limit`` members are produced and
    offered to the archive. Returns (AF, AK, size, evaluations).
    """
    N, n = RING.shape
    count = min(N, limit)
    if asize >= N:
        chosen = rng.permutation(asize)[:N]
    else:
        chosen = np.arange(asize)
    r = 0
    for idx in chosen:
        if r >= count:
            break
        load_member(RING, LEN, POS, ASG, KEY, OBJ, r, AK[idx].copy(), C, D)
        L, f1, f2 = LEN[r], OBJ[r, 0], OBJ[r, 1]
        for _ in range(mutations):
            L, f1, f2 = row_mutate(RING[r], POS[r], ASG[r], KEY[r], L, f1, f2, C, D, rng,
                                   1.0, w_remove, w_insert, w_two_opt)
        LEN[r] = L
        OBJ[r, 0] = f1
        OBJ[r, 1] = f2
        r += 1
    while r < count:
        load_member(RING, LEN, POS, ASG, KEY, OBJ, r, random_keys(n, rng), C, D)
        r += 1
    for q in range(count):
        AF, AK, asize, _ = archive_insert(AF, AK, asize, OBJ[q, 0], OBJ[q, 1], KEY[q])
    return AF, AK, asize, count


@njit(cache=True)
def ls_run(RING, LEN, POS, ASG, KEY, OBJ, AF, AK, asize, C, D, kappa, rng, limit, max_steps,
           iterated, mutations, w_remove, w_insert, w_two_opt):
    """Steps until ``max_steps`` or ``limit`` evaluations are used.

    The plain form finishes when a step leaves the archive unchanged; the
    iterated form restarts from noise instead. Returns
    (AF, AK, size, evaluations, steps, restarts, finished).
    """
    used = 0
    steps = 0
    restarts = 0
    while steps < max_steps and used < limit:
        AF, AK, asize, u, changed = ls_step(RING, LEN, POS, ASG, KEY, OBJ, AF, AK, asize, C, D,
                                            kappa, rng, limit - used)
        used += u
        steps += 1
        if changed:
            continue
        if not iterated:
            return AF, AK, asize, used, steps, restarts, True
        if used >= limit:
            break
        AF, AK, asize, u = noise_restart(RING, LEN, POS, ASG, KEY, OBJ, AF, AK, asize, C, D, rng,
                                         limit - used, mutations, w_remove, w_insert, w_two_opt)
        used += u
        restarts += 1
    return AF, AK, asize, used, steps, restarts, False
