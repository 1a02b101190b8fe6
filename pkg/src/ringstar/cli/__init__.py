"""Command-line entry points.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from ringstar.algorithms import ALGORITHMS, AlgoConfig, Budget, RunRecord, default_budget, default_config, run_algorithm
from ringstar.assessment import (
    ReferenceData,
    attainment_surface,
    mann_whitney,
    reference_set,
    scalarize_front,
    score_runs,
    write_comparison_csv,
    write_polyline_csv,
    write_scores_csv,
)
from ringstar.cli.records import atomic_write, load_runs, save_record
from ringstar.core import ContractError, OracleSizeError, brute_force_front
from ringstar.instance import CostModel, Instance, TSPLIBParseError, load_instance
from ringstar.pareto import NormBounds


class UsageError(Exception):
    pass


def parse_seeds(text: str) -> list[int]:
    """``1..20`` (inclusive), ``1,4,9`` or a single seed."""
    seeds: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            seeds += list(range(int(lo), int(hi) + 1))
        elif part:
            seeds.append(int(part))
    if not seeds:
        raise UsageError("no seeds given")
    if len(set(seeds)) != len(seeds):
        raise UsageError("seeds must be distinct")
    return seeds


def thread_cap() -> int:
    raw = os.environ.get("RSP_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"RSP_THREADS must be an integer, got {raw!r}") from None


def _run_one(args: tuple[str, str, str, AlgoConfig, Budget, int, str]) -> str:
    instance, cost_model, algo, cfg, budget, seed, out = args
    inst = load_instance(instance, CostModel.parse(cost_model))
    record = run_algorithm(algo, inst, cfg, budget, seed)
    path = Path(out) / f"{inst.name}_{algo}_s{seed}.json"
    save_record(record, path)
    return str(path)


def _config_from_args(args: argparse.Namespace, inst: Instance) -> AlgoConfig:
    cfg = default_config(args.algo, inst.name, inst.n)
    mix = cfg.mix
    if args.pc is not None or args.pm is not None:
        mix = replace(mix, p_crossover=args.pc if args.pc is not None else mix.p_crossover,
                      p_mutation=args.pm if args.pm is not None else mix.p_mutation)
    return cfg.with_overrides(population_size=args.pop, noise_rate=args.noise, kappa=args.kappa,
                              delta=args.delta, step_fraction=args.step_fraction,
                              ls_population=args.ls_pop, mix=mix)


def cmd_solve(args: argparse.Namespace) -> int:
    try:
        model = CostModel.parse(args.cost_model)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    inst = load_instance(args.instance, model)
    try:
        cfg = _config_from_args(args, inst)
        if args.budget:
            budget = Budget.parse(args.budget)
        else:
            budget = default_budget(inst.name)
            if budget is None:
                raise UsageError(f"no default budget for instance {inst.name!r}; pass --budget")
        seeds = parse_seeds(args.seeds)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(args.instance, args.cost_model, args.algo, cfg, budget, s, str(out)) for s in seeds]
    workers = min(thread_cap(), len(jobs))
    if workers <= 1:
        paths = [_run_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            paths = list(pool.map(_run_one, jobs))
    for p in paths:
        print(p)
    return 0


def _refdata_to_dict(instance: str, ref: ReferenceData) -> dict:
    return {
        "instance": instance,
        "zref": [list(z) for z in ref.zref],
        "zmax": list(ref.zmax),
        "bounds": {"lo": list(ref.bounds.lo), "hi": list(ref.bounds.hi)},
        "ref_point": list(ref.ref_point),
    }


def _refdata_from_file(path: str) -> tuple[str, ReferenceData]:
    with open(path, encoding="utf-8") as fh:
        d = json.load(fh)
    b = d["bounds"]
    ref = ReferenceData([tuple(z) for z in d["zref"]], tuple(d["zmax"]),
                        NormBounds(tuple(b["lo"]), tuple(b["hi"])))
    return d["instance"], ref


def _single_instance(runs: Sequence[RunRecord]) -> str:
    names = sorted({r.instance for r in runs})
    if len(names) != 1:
        raise ContractError(f"run records mix instances: {names}")
    return names[0]


def _reference_for(runs: Sequence[RunRecord], path: str | None) -> ReferenceData:
    instance = _single_instance(runs)
    if path is None:
        return reference_set(r.vectors() for r in runs)
    name, ref = _refdata_from_file(path)
    if name != instance:
        raise ContractError(f"reference set is for {name!r}, runs are on {instance!r}")
    return ref


def cmd_reference(args: argparse.Namespace) -> int:
    runs = load_runs(args.runs)
    instance = _single_instance(runs)
    ref = reference_set(r.vectors() for r in runs)
    atomic_write(args.out, json.dumps(_refdata_to_dict(instance, ref), indent=1) + "\n")
    print(args.out)
    return 0


def cmd_assess(args: argparse.Namespace) -> int:
    runs = load_runs(args.runs)
    ref = _reference_for(runs, args.reference)
    rows = score_runs(runs, ref)
    write_scores_csv(args.out, rows)
    print(args.out)
    return 0


METRICS = {"hv": "i_h_minus", "eps": "i_eps_plus"}


def cmd_compare(args: argparse.Namespace) -> int:
    runs_a = load_runs([args.a])
    runs_b = load_runs([args.b])
    ref = _reference_for(runs_a + runs_b, args.reference)
    rows_a = score_runs(runs_a, ref)
    rows_b = score_runs(runs_b, ref)
    name_a = "+".join(sorted({r.algorithm for r in runs_a}))
    name_b = "+".join(sorted({r.algorithm for r in runs_b}))
    metrics = list(METRICS) if args.metric == "all" else [args.metric]
    out = []
    for m in metrics:
        field = METRICS[m]
        res = mann_whitney([getattr(r, field) for r in rows_a], [getattr(r, field) for r in rows_b],
                           alpha=args.alpha)
        out.append((name_a, name_b, m, res))
        print(f"{m}: {name_a} vs {name_b} p={res.p_value:.4g} ({res.method}) -> {res.verdict}")
    write_comparison_csv(args.out, out)
    return 0


def cmd_attain(args: argparse.Namespace) -> int:
    runs = load_runs(args.runs)
    _single_instance(runs)
    poly = attainment_surface([r.vectors() for r in runs], args.level)
    write_polyline_csv(args.out, poly)
    print(args.out)
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance, CostModel.parse(args.cost_model))
    front = brute_force_front(inst)
    doc = {
        "instance": inst.name,
        "cost_model": str(inst.cost_model),
        "front": [{"f1": p.f1, "f2": p.f2, "ring": list(p.ring)} for p in front],
    }
    text = json.dumps(doc, indent=1) + "\n"
    if args.out:
        atomic_write(args.out, text)
        print(args.out)
    else:
        sys.stdout.write(text)
    return 0


def _load_front_file(path: str) -> tuple[str, list[tuple[int, int]]]:
    """Cost model and vectors of a run record or an oracle front file."""
    with open(path, encoding="utf-8") as fh:
        d = json.load(fh)
    return d.get("cost_model", "plain"), [(int(p["f1"]), int(p["f2"])) for p in d["front"]]


def cmd_scalarize(args: argparse.Namespace) -> int:
    expected = f"scalarized:{args.alpha}"
    results = []
    for path in args.fronts:
        model, front = _load_front_file(path)
        if model != expected:
            raise ContractError(f"{path} was computed under {model!r} costs, not {expected!r}")
        value, witness = scalarize_front(front, args.alpha)
        results.append({"file": path, "value": value, "witness": list(witness)})
    text = json.dumps(results, indent=1) + "\n"
    if args.out:
        atomic_write(args.out, text)
    sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ringstar", description="Bi-objective ring star problem toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="run an algorithm for one or more seeds")
    s.add_argument("--instance", required=True, help="TSPLIB file or bundled instance name")
    s.add_argument("--algo", required=True, choices=sorted(ALGORITHMS))
    s.add_argument("--budget", help="evals:N or seconds:S (default: per-instance running time)")
    s.add_argument("--seeds", default="1", help="e.g. 1..20 or 1,2,3")
    s.add_argument("--out", default="runs")
    s.add_argument("--cost-model", default="plain", help="plain or scalarized:ALPHA")
    s.add_argument("--pop", type=int)
    s.add_argument("--noise", type=float)
    s.add_argument("--kappa", type=float)
    s.add_argument("--delta", type=float)
    s.add_argument("--step-fraction", type=float)
    s.add_argument("--ls-pop", type=int)
    s.add_argument("--pc", type=float, help="crossover probability")
    s.add_argument("--pm", type=float, help="mutation probability")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("reference", help="build the reference set of a group of runs")
    s.add_argument("runs", nargs="+")
    s.add_argument("--out", default="reference.json")
    s.set_defaults(func=cmd_reference)

    s = sub.add_parser("assess", help="score runs against a reference set")
    s.add_argument("runs", nargs="+")
    s.add_argument("--reference")
    s.add_argument("--out", default="scores.csv")
    s.set_defaults(func=cmd_assess)

    s = sub.add_parser("compare", help="rank-sum test between two groups of runs")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--metric", choices=["hv", "eps", "all"], default="all")
    s.add_argument("--alpha", type=float, default=0.05)
    s.add_argument("--reference")
    s.add_argument("--out", default="comparison.csv")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("attain", help="empirical attainment surface")
    s.add_argument("runs", nargs="+")
    s.add_argument("--level", type=float, default=0.9)
    s.add_argument("--out", default="attainment.csv")
    s.set_defaults(func=cmd_attain)

    s = sub.add_parser("oracle", help="exact front by enumeration (n <= 10)")
    s.add_argument("--instance", required=True)
    s.add_argument("--cost-model", default="plain")
    s.add_argument("--out")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("scalarize", help="best aggregated value of fronts under scalarised costs")
    s.add_argument("fronts", nargs="+", help="run records or oracle front files")
    s.add_argument("--alpha", type=int, required=True, choices=[3, 5, 7, 9])
    s.add_argument("--out")
    s.set_defaults(func=cmd_scalarize)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (ContractError, OracleSizeError, TSPLIBParseError, FileNotFoundError, ValueError,
            KeyError, OSError) as exc:
        print(f"ringstar: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
