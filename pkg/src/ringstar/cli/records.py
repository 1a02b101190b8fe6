"""JSON persistence of run records and small file helpers."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable

from ringstar.algorithms.config import AlgoConfig, Budget, RunRecord


def record_to_dict(r: RunRecord) -> dict[str, Any]:
    return {
        "instance": r.instance,
        "algorithm": r.algorithm,
        "seed": r.seed,
        "cost_model": r.cost_model,
        "config": r.config.to_dict(),
        "budget": {"mode": r.budget.mode, "amount": r.budget.amount},
        "evaluations": r.evaluations,
        "elapsed_seconds": r.elapsed_seconds,
        "launches_ls": r.launches_ls,
        "front": [{"f1": f1, "f2": f2, "keys": keys} for f1, f2, keys in r.front],
        "trace": r.trace,
    }


def record_from_dict(d: dict[str, Any]) -> RunRecord:
    try:
        return RunRecord(
            algorithm=d["algorithm"],
            instance=d["instance"],
            seed=int(d["seed"]),
            config=AlgoConfig.from_dict(d["config"]),
            budget=Budget(d["budget"]["mode"], d["budget"]["amount"]),
            evaluations=int(d["evaluations"]),
            elapsed_seconds=float(d["elapsed_seconds"]),
            front=[(int(p["f1"]), int(p["f2"]), list(p["keys"])) for p in d["front"]],
            cost_model=d.get("cost_model", "plain"),
            launches_ls=d.get("launches_ls"),
            trace=list(d.get("trace", [])),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed run record: {exc}") from exc


def dumps_record(r: RunRecord) -> str:
    return json.dumps(record_to_dict(r), indent=1) + "\n"


def atomic_write(path: str | Path, text: str) -> None:
    """Write to a temporary file in the target directory, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_record(r: RunRecord, path: str | Path) -> None:
    atomic_write(path, dumps_record(r))


def load_record(path: str | Path) -> RunRecord:
    with open(path, encoding="utf-8") as fh:
        return record_from_dict(json.load(fh))


def expand_paths(items: Iterable[str]) -> list[Path]:
    """Files as given; directories contribute their ``*.json`` files, sorted."""
    out: list[Path] = []
    for item in items:
        p = Path(item)
        if p.is_dir():
            out += sorted(p.glob("*.json"))
        elif p.exists():
            out.append(p)
        else:
            raise FileNotFoundError(f"no such file or directory: {item}")
    return out


def load_runs(items: Iterable[str]) -> list[RunRecord]:
    paths = expand_paths(items)
    if not paths:
        raise FileNotFoundError("no run records found")
    return [load_record(p) for p in paths]
