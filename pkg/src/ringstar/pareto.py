"""Dominance, normalisation and the unbounded non-dominated archive."""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Any, Generic, Iterable, Iterator, Sequence, TypeVar

import numpy as np

Vector = tuple[int, int]
T = TypeVar("T")


def weakly_dominates(z: Sequence[float], zp: Sequence[float]) -> bool:
    return z[0] <= zp[0] and z[1] <= zp[1]


def dominates(z: Sequence[float], zp: Sequence[float]) -> bool:
    return z[0] <= zp[0] and z[1] <= zp[1] and (z[0] < zp[0] or z[1] < zp[1])


def nondominated(vectors: Iterable[Sequence[int]]) -> list[Vector]:
    """Distinct non-dominated vectors, sorted by the first objective."""
    out: list[Vector] = []
    for f1, f2 in sorted({(int(a), int(b)) for a, b in vectors}):
        if not out or f2 < out[-1][1]:
            out.append((f1, f2))
    return out


def nondominated_mask(objs: np.ndarray) -> np.ndarray:
    """Boolean mask of rows not dominated by any other row (duplicates all kept)."""
    objs = np.asarray(objs)
    le = np.all(objs[:, None, :] <= objs[None, :, :], axis=2)
    lt = np.any(objs[:, None, :] < objs[None, :, :], axis=2)
    dominated = np.any(le & lt, axis=0)
    return ~dominated


@dataclass(frozen=True)
class NormBounds:
    lo: tuple[float, float]
    hi: tuple[float, float]

    def __post_init__(self) -> None:
        if self.lo[0] > self.hi[0] or self.lo[1] > self.hi[1]:
            raise ValueError("bounds need min <= max per objective")

    @classmethod
    def of(cls, vectors: Iterable[Sequence[float]]) -> "NormBounds":
        arr = np.asarray(list(vectors), dtype=float).reshape(-1, 2)
        if arr.shape[0] == 0:
            raise ValueError("bounds of an empty set")
        lo, hi = arr.min(axis=0), arr.max(axis=0)
        return cls((float(lo[0]), float(lo[1])), (float(hi[0]), float(hi[1])))

    @property
    def span(self) -> np.ndarray:
        return np.array(self.hi) - np.array(self.lo)


def normalize(z: Sequence[float], b: NormBounds) -> tuple[float, float]:
    """Map into [0, 1] per objective; a degenerate span maps to 0."""
    out = []
    for i in range(2):
        span = b.hi[i] - b.lo[i]
        out.append(0.0 if span == 0 else (z[i] - b.lo[i]) / span)
    return out[0], out[1]


def normalize_array(objs: np.ndarray, b: NormBounds) -> np.ndarray:
    objs = np.asarray(objs, dtype=float).reshape(-1, 2)
    lo = np.array(b.lo)
    span = np.array(b.hi) - lo
    safe = np.where(span == 0, 1.0, span)
    return np.where(span == 0, 0.0, (objs - lo) / safe)


class Archive(Generic[T]):
    """Mutually non-dominated entries kept sorted by ascending ``f1``
    (hence strictly descending ``f2``). A vector equal to a stored one is
    rejected, so the first solution seen for a point is kept."""

    def __init__(self) -> None:
        self._f1: list[int] = []
        self._f2: list[int] = []
        self._items: list[T] = []

    def __len__(self) -> int:
        return len(self._f1)

    def __iter__(self) -> Iterator[tuple[Vector, T]]:
        return iter(zip(zip(self._f1, self._f2), self._items))

    def update(self, z: Sequence[int], item: T = None) -> bool:
        """Offer ``item`` with objectives ``z``; return whether the archive changed."""
        f1, f2 = int(z[0]), int(z[1])
        k = bisect.bisect_right(self._f1, f1)
        # entry k-1 has the smallest f2 among entries with f1' <= f1
        if k > 0 and self._f2[k - 1] <= f2:
            return False
        j = k
        while j < len(self._f1) and self._f2[j] >= f2:
            j += 1
        # entries in [k', j) with f1' >= f1 and f2' >= f2 are dominated
        start = k
        while start > 0 and self._f1[start - 1] == f1:
            start -= 1
        del self._f1[start:j], self._f2[start:j], self._items[start:j]
        self._f1.insert(start, f1)
        self._f2.insert(start, f2)
        self._items.insert(start, item)
        return True

    def vectors(self) -> list[Vector]:
        return list(zip(self._f1, self._f2))

    def items(self) -> list[T]:
        return list(self._items)

    def item(self, k: int) -> T:
        return self._items[k]

    def reset(self, vectors: Sequence[Sequence[int]], items: Sequence[T]) -> None:
        """Replace the contents with entries already sorted and mutually non-dominated."""
        self._f1 = [int(z[0]) for z in vectors]
        self._f2 = [int(z[1]) for z in vectors]
        self._items = list(items)

    def copy(self) -> "Archive[T]":
        other: Archive[T] = Archive()
        other._f1, other._f2, other._items = list(self._f1), list(self._f2), list(self._items)
        return other


def archive_update(a: Archive[Any], candidate: tuple[Any, Sequence[int]]) -> tuple[Archive[Any], bool]:
    """Functional form of :meth:`Archive.update` taking ``(payload, vector)``."""
    payload, z = candidate
    inserted = a.update(z, payload)
    return a, inserted
