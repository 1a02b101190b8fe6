"""The stand-alone metaheuristics, the cooperative hybrids and a name registry."""

from __future__ import annotations

from typing import Callable

from ringstar.algorithms.config import (
    EVALS,
    INSTANCE_DEFAULTS,
    SECONDS,
    AlgoConfig,
    Budget,
    BudgetTracker,
    RunRecord,
    default_budget,
    default_config,
)
from ringstar.algorithms.hybrid import acs_run, pcs_run
from ringstar.algorithms.ibea import ibea_run, ibea_truncate
from ringstar.algorithms.ibmols import LSState, ibmols_iterated, ibmols_step, local_search, run_ibmols
from ringstar.algorithms.nsga2 import crowding_distance, fast_nondominated_sort, nsga2_run
from ringstar.algorithms.seea import SEEA, seea_run
from ringstar.instance import Instance

Runner = Callable[[Instance, AlgoConfig, Budget, int], RunRecord]

ALGORITHMS: dict[str, Runner] = {
    "ibmols": run_ibmols,
    "seea": seea_run,
    "ibea": ibea_run,
    "nsga2": nsga2_run,
    "pcs": pcs_run,
    "acs": acs_run,
}


def run_algorithm(name: str, inst: Instance, cfg: AlgoConfig, budget: Budget, seed: int) -> RunRecord:
    try:
        runner = ALGORITHMS[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}") from None
    return runner(inst, cfg, budget, seed)


__all__ = [
    "ALGORITHMS", "EVALS", "INSTANCE_DEFAULTS", "SECONDS", "AlgoConfig", "Budget", "BudgetTracker",
    "LSState", "RunRecord", "SEEA", "acs_run", "crowding_distance", "default_budget",
    "default_config", "fast_nondominated_sort", "ibea_run", "ibea_truncate", "ibmols_iterated",
    "ibmols_step", "local_search", "nsga2_run", "pcs_run", "run_algorithm", "run_ibmols", "seea_run",
]
