"""TSPLIB loading and the two cost matrices of a ring star instance.

Nodes are 0-based internally; node 0 is the depot (TSPLIB node 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

DEPOT = 0
SCALARIZED_ALPHAS = (3, 5, 7, 9)


class TSPLIBParseError(ValueError):
    """Raised for malformed or unsupported TSPLIB input."""


@dataclass(frozen=True)
class CostModel:
    """``plain`` sets both costs to the rounded distance; ``scalarized`` uses
    ``ceil(alpha * l)`` for the ring and ``ceil((10 - alpha) * l)`` for assignments."""

    kind: str = "plain"
    alpha: int | None = None

    def __post_init__(self) -> None:
        if self.kind == "plain":
            if self.alpha is not None:
                raise ValueError("plain cost model takes no alpha")
        elif self.kind == "scalarized":
            if self.alpha not in SCALARIZED_ALPHAS:
                raise ValueError(f"alpha must be one of {SCALARIZED_ALPHAS}, got {self.alpha!r}")
        else:
            raise ValueError(f"unknown cost model {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "CostModel":
        """Parse ``plain`` or ``scalarized:<alpha>``."""
        if text == "plain":
            return cls()
        kind, _, alpha = text.partition(":")
        if kind != "scalarized" or not alpha:
            raise ValueError(f"cost model must be 'plain' or 'scalarized:<alpha>', got {text!r}")
        return cls("scalarized", int(alpha))

    def __str__(self) -> str:
        return self.kind if self.alpha is None else f"{self.kind}:{self.alpha}"


@dataclass(frozen=True, eq=False)
class Instance:
    name: str
    coords: np.ndarray
    ring_cost: np.ndarray
    assign_cost: np.ndarray
    cost_model: CostModel = field(default_factory=CostModel)

    def __post_init__(self) -> None:
        for arr in (self.coords, self.ring_cost, self.assign_cost):
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return int(self.coords.shape[0])

    @property
    def depot(self) -> int:
        return DEPOT


def euclid_distance(a: tuple[float, float], b: tuple[float, float]) -> int:
    """TSPLIB EUC_2D distance: Euclidean length rounded half-up to an integer."""
    return int(math.floor(math.hypot(a[0] - b[0], a[1] - b[1]) + 0.5))


def distance_matrix(coords: np.ndarray) -> np.ndarray:
    n = coords.shape[0]
    out = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = euclid_distance(coords[i], coords[j])
    return out


def build_costs(coords: np.ndarray, model: CostModel | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(ring_cost, assign_cost)`` for the given coordinates."""
    model = model or CostModel()
    dist = distance_matrix(np.asarray(coords, dtype=float))
    if model.kind == "plain":
        return dist, dist.copy()
    alpha = model.alpha
    # dist is integral, so ceil(alpha * dist) == alpha * dist exactly
    return alpha * dist, (10 - alpha) * dist


def make_instance(name: str, coords: Iterable[tuple[float, float]], model: CostModel | None = None) -> Instance:
    model = model or CostModel()
    xy = np.asarray(list(coords), dtype=float).reshape(-1, 2)
    if xy.shape[0] < 2:
        raise ValueError("an instance needs at least two nodes")
    ring, assign = build_costs(xy, model)
    return Instance(name, xy, ring, assign, model)


def parse_tsplib(source: TextIO | str, model: CostModel | None = None) -> Instance:
    """Parse an EUC_2D TSPLIB file from a text stream (or a string of its contents)."""
    lines = source.splitlines() if isinstance(source, str) else source.read().splitlines()
    header: dict[str, str] = {}
    coords: dict[int, tuple[float, float]] = {}
    in_coords = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line == "EOF":
            break
        if in_coords:
            parts = line.split()
            if len(parts) != 3:
                raise TSPLIBParseError(f"line {lineno}: expected 'index x y', got {raw!r}")
            try:
                idx, x, y = int(parts[0]), float(parts[1]), float(parts[2])
            except ValueError:
                raise TSPLIBParseError(f"line {lineno}: bad coordinate record {raw!r}") from None
            if idx in coords:
                raise TSPLIBParseError(f"line {lineno}: duplicate node index {idx}")
            coords[idx] = (x, y)
            continue
        if line.startswith("NODE_COORD_SECTION"):
            in_coords = True
            continue
        if line.endswith("_SECTION"):
            raise TSPLIBParseError(f"line {lineno}: unsupported section {line!r}")
        key, sep, value = line.partition(":")
        if not sep:
            raise TSPLIBParseError(f"line {lineno}: malformed header {raw!r}")
        key, value = key.strip().upper(), value.strip()
        header[key] = value
        if key == "EDGE_WEIGHT_TYPE" and value.upper() != "EUC_2D":
            raise TSPLIBParseError(f"line {lineno}: unsupported edge weight type {value!r}")

    if "DIMENSION" not in header:
        raise TSPLIBParseError("missing DIMENSION header")
    try:
        dim = int(header["DIMENSION"])
    except ValueError:
        raise TSPLIBParseError(f"bad DIMENSION value {header['DIMENSION']!r}") from None
    if header.get("EDGE_WEIGHT_TYPE", "").upper() != "EUC_2D":
        raise TSPLIBParseError("missing EDGE_WEIGHT_TYPE (only EUC_2D is supported)")
    if not in_coords:
        raise TSPLIBParseError("missing NODE_COORD_SECTION")
    if len(coords) != dim:
        raise TSPLIBParseError(f"DIMENSION is {dim} but {len(coords)} coordinates were read")
    if sorted(coords) != list(range(1, dim + 1)):
        raise TSPLIBParseError("node indices must be 1..DIMENSION")
    # file order == index order once validated
    ordered = [coords[i] for i in range(1, dim + 1)]
    return make_instance(header.get("NAME", "unnamed"), ordered, model)


def load_instance(path: str | Path, model: CostModel | None = None) -> Instance:
    """Load a TSPLIB file; a bare name such as ``eil51`` resolves to bundled data."""
    p = Path(path)
    if not p.exists() and not p.suffix:
        bundled = resources.files("ringstar") / "data" / f"{p.name}.tsp"
        if bundled.is_file():
            return parse_tsplib(bundled.read_text(), model)
    with open(p, encoding="utf-8") as fh:
        return parse_tsplib(fh, model)


def random_instance(n: int, rng: np.random.Generator, size: int = 100, model: CostModel | None = None,
                    name: str | None = None) -> Instance:
    """Random integer EUC_2D instance, used by tests and oracles."""
    xy = rng.integers(0, size, size=(n, 2))
    return make_instance(name or f"rand{n}", [tuple(p) for p in xy.astype(float)], model)


def to_tsplib(inst: Instance) -> str:
    out = [f"NAME : {inst.name}", "TYPE : TSP", f"DIMENSION : {inst.n}", "EDGE_WEIGHT_TYPE : EUC_2D",
           "NODE_COORD_SECTION"]
    for i, (x, y) in enumerate(inst.coords, start=1):
        out.append(f"{i} {x:g} {y:g}")
    out.append("EOF")
    return "\n".join(out) + "\n"
