"""Reference sets, quality indicators per run, rank-sum tests, attainment surfaces."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ringstar.core import ContractError
from ringstar.indicators import eps_unary_set, hypervolume_2d
from ringstar.instance import SCALARIZED_ALPHAS
from ringstar.pareto import NormBounds, Vector, nondominated, normalize, normalize_array

REF_FACTOR = 1.05
EXACT_MAX_SIZE = 12
VERDICTS = ("a_better", "b_better", "no_difference")


@dataclass(frozen=True)
class ReferenceData:
    zref: list[Vector]
    zmax: tuple[int, int]
    bounds: NormBounds

    @property
    def ref_point(self) -> tuple[float, float]:
        return REF_FACTOR * self.zmax[0], REF_FACTOR * self.zmax[1]

    @property
    def ref_point_normalized(self) -> tuple[float, float]:
        """The reference point in normalised space; a flat objective gets 1.05."""
        z = normalize(self.ref_point, self.bounds)
        span = self.bounds.span
        return tuple(REF_FACTOR if span[i] == 0 else z[i] for i in range(2))  # type: ignore[return-value]

    def normalize(self, vectors: Iterable[Sequence[float]]) -> np.ndarray:
        return normalize_array(np.asarray(list(vectors), dtype=float).reshape(-1, 2), self.bounds)


def reference_set(fronts: Iterable[Iterable[Sequence[int]]]) -> ReferenceData:
    """Non-dominated union of the fronts plus the pooled maxima and bounds."""
    pooled = [(int(a), int(b)) for front in fronts for a, b in front]
    if not pooled:
        raise ContractError("reference set needs at least one non-empty front")
    bounds = NormBounds.of(pooled)
    zmax = (max(a for a, _ in pooled), max(b for _, b in pooled))
    return ReferenceData(nondominated(pooled), zmax, bounds)


@dataclass(frozen=True)
class ScoreRow:
    run_id: str
    algorithm: str
    seed: int
    i_h_minus: float
    i_eps_plus: float


def score_front(front: Iterable[Sequence[int]], ref: ReferenceData) -> tuple[float, float]:
    """(hypervolume difference, additive epsilon) of one front against the reference."""
    a = ref.normalize(front)
    z = ref.normalize(ref.zref)
    rp = ref.ref_point_normalized
    hv = hypervolume_2d(z, rp) - hypervolume_2d(a, rp)
    eps = eps_unary_set(list(front), ref.zref, ref.bounds)
    return hv, eps


def score_runs(runs: Sequence, ref: ReferenceData) -> list[ScoreRow]:
    """One row per run, in input order. Runs are :class:`RunRecord` objects."""
    names = {r.instance for r in runs}
    if len(names) > 1:
        raise ContractError(f"runs mix instances: {sorted(names)}")
    rows = []
    for k, r in enumerate(runs):
        hv, eps = score_front(r.vectors(), ref)
        run_id = getattr(r, "run_id", None) or f"{r.algorithm}-{r.seed}-{k}"
        rows.append(ScoreRow(run_id, r.algorithm, r.seed, hv, eps))
    return rows


# ---- Mann-Whitney ----

@dataclass(frozen=True)
class MannWhitneyResult:
    u: float
    p_a_better: float
    p_b_better: float
    verdict: str
    method: str

    @property
    def p_value(self) -> float:
        return min(self.p_a_better, self.p_b_better)


def midranks(values: Sequence[float]) -> np.ndarray:
    x = np.asarray(values, dtype=float)
    order = np.argsort(x, kind="stable")
    ranks = np.empty(x.size)
    i = 0
    while i < x.size:
        j = i
        while j + 1 < x.size and x[order[j + 1]] == x[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _exact_lower(ranks: np.ndarray, na: int, observed: float) -> tuple[float, float]:
    """P(rank sum of a <= observed) and P(>= observed) over all group assignments.

    Midranks are halves at worst, so doubled ranks are integers and the
    number of size-``na`` subsets per rank sum is a subset-sum count.
    """
    twice = np.rint(2 * ranks).astype(np.int64)
    top = int(twice.sum())
    # counts[k][s]: subsets of size k with doubled rank sum s (Python ints, no overflow)
    counts = [[0] * (top + 1) for _ in range(na + 1)]
    counts[0][0] = 1
    for w in twice.tolist():
        for k in range(na, 0, -1):
            row, prev = counts[k], counts[k - 1]
            for s in range(top, w - 1, -1):
                if prev[s - w]:
                    row[s] += prev[s - w]
    dist = counts[na]
    obs = int(round(2 * observed))
    total = sum(dist)
    le = sum(dist[: obs + 1])
    ge = sum(dist[obs:])
    return le / total, ge / total


def _normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def mann_whitney(a: Sequence[float], b: Sequence[float], alpha: float = 0.05,
                 direction: str = "lower", method: str = "auto") -> MannWhitneyResult:
    """Rank-sum test run one-sided in both directions.

    ``direction`` says which values are better. The exact null
    distribution is counted when the combined size is at most 12
    (``method="auto"``), otherwise a normal approximation with tie
    correction and continuity correction is used. A verdict needs p < alpha.
    """
    if len(a) == 0 or len(b) == 0:
        raise ContractError("both samples must be non-empty")
    if direction not in ("lower", "higher"):
        raise ValueError("direction must be 'lower' or 'higher'")
    if method not in ("auto", "exact", "normal"):
        raise ValueError("method must be 'auto', 'exact' or 'normal'")
    na, nb = len(a), len(b)
    N = na + nb
    ranks = midranks(list(a) + list(b))
    ra = float(ranks[:na].sum())
    u = ra - na * (na + 1) / 2.0
    if method == "exact" or (method == "auto" and N <= EXACT_MAX_SIZE):
        used = "exact"
        p_low, p_high = _exact_lower(ranks, na, ra)
    else:
        used = "normal"
        _, counts = np.unique(ranks, return_counts=True)
        tie = float(np.sum(counts ** 3 - counts))
        var = na * nb / 12.0 * ((N + 1) - tie / (N * (N - 1)))
        mean = na * nb / 2.0
        if var <= 0:
            p_low = p_high = 1.0
        else:
            sd = math.sqrt(var)
            p_low = _normal_cdf((u - mean + 0.5) / sd)
            p_high = _normal_cdf((mean - u + 0.5) / sd)
    p_a, p_b = (p_low, p_high) if direction == "lower" else (p_high, p_low)
    p_a, p_b = min(1.0, p_a), min(1.0, p_b)
    if p_a < alpha:
        verdict = "a_better"
    elif p_b < alpha:
        verdict = "b_better"
    else:
        verdict = "no_difference"
    return MannWhitneyResult(u, p_a, p_b, verdict, used)


# ---- attainment ----

def attainment_surface(fronts: Sequence[Iterable[Sequence[int]]], level: float) -> list[tuple[int, int]]:
    """Staircase reached by at least ``ceil(level * runs)`` of the fronts.

    Vertices alternate between the attained points and the corners joining
    them; abscissae where too few fronts reach anything are left out.
    """
    if not 0.0 < level <= 1.0:
        raise ValueError("level must lie in (0, 1]")
    fronts = [sorted((int(x), int(y)) for x, y in f) for f in fronts]
    if not fronts:
        raise ContractError("attainment surface needs at least one front")
    need = max(1, math.ceil(level * len(fronts) - 1e-9))
    grid = sorted({x for f in fronts for x, _ in f})
    points: list[tuple[int, int]] = []
    for x in grid:
        best = []
        for f in fronts:
            ys = [y for fx, y in f if fx <= x]
            best.append(min(ys) if ys else math.inf)
        best.sort()
        y = best[need - 1]
        if y == math.inf:
            continue
        if not points or y < points[-1][1]:
            points.append((x, int(y)))
    poly: list[tuple[int, int]] = []
    for k, (x, y) in enumerate(points):
        if k:
            poly.append((x, points[k - 1][1]))
        poly.append((x, y))
    return poly


def scalarize_front(front: Iterable[Sequence[int]], alpha: int) -> tuple[int, tuple[int, int]]:
    """Smallest f1 + f2 on a front computed under the matching scalarised costs."""
    if alpha not in SCALARIZED_ALPHAS:
        raise ValueError(f"alpha must be one of {SCALARIZED_ALPHAS}")
    pts = [(int(x), int(y)) for x, y in front]
    if not pts:
        raise ContractError("cannot scalarise an empty front")
    best = min(pts, key=lambda z: (z[0] + z[1], z[0]))
    return best[0] + best[1], best


# ---- CSV output ----

def _write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def write_scores_csv(path: str | Path, rows: Iterable[ScoreRow]) -> None:
    _write_csv(path, ("run_id", "algorithm", "seed", "i_h_minus", "i_eps_plus"),
               ((r.run_id, r.algorithm, r.seed, repr(r.i_h_minus), repr(r.i_eps_plus)) for r in rows))


def write_comparison_csv(path: str | Path, rows: Iterable[tuple[str, str, str, MannWhitneyResult]]) -> None:
    _write_csv(path, ("algo_a", "algo_b", "metric", "p_value", "verdict", "method"),
               ((a, b, m, repr(r.p_value), r.verdict, r.method) for a, b, m, r in rows))


def write_polyline_csv(path: str | Path, poly: Iterable[tuple[int, int]]) -> None:
    _write_csv(path, ("f1", "f2"), poly)
