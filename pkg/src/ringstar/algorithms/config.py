"""Run budgets, algorithm parameters, per-instance defaults and run records."""

from __future__ import annotations

import math
import sys
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Any

from ringstar.variation import OperatorMix

EVALS, SECONDS = "evals", "seconds"


@dataclass(frozen=True)
class Budget:
    mode: str
    amount: float

    def __post_init__(self) -> None:
        if self.mode not in (EVALS, SECONDS):
            raise ValueError(f"budget mode must be {EVALS!r} or {SECONDS!r}")
        if self.amount < 0:
            raise ValueError("budget amount must be non-negative")
        if self.mode == EVALS and self.amount != int(self.amount):
            raise ValueError("evaluation budgets are integral")

    @classmethod
    def parse(cls, text: str) -> "Budget":
        """``evals:200000`` or ``seconds:20``."""
        mode, sep, amount = text.partition(":")
        if not sep:
            raise ValueError(f"budget must look like 'evals:N' or 'seconds:S', got {text!r}")
        mode = {"eval": EVALS, "evals": EVALS, "s": SECONDS, "sec": SECONDS, "seconds": SECONDS}.get(mode)
        if mode is None:
            raise ValueError(f"unknown budget mode in {text!r}")
        value = float(amount)
        return cls(mode, int(value) if mode == EVALS else value)

    def step(self, fraction: float) -> float:
        """Hybrid step length, rounded up to the budget's unit."""
        return max(1, math.ceil(fraction * self.amount))

    def __str__(self) -> str:
        return f"{self.mode}:{self.amount:g}"


class BudgetTracker:
    """Counts evaluations and watches the clock for one run."""

    def __init__(self, budget: Budget) -> None:
        self.budget = budget
        self.used = 0
        self._t0 = time.perf_counter()

    def charge(self, k: int = 1) -> None:
        self.used += k

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self._t0

    @property
    def exhausted(self) -> bool:
        if self.budget.mode == EVALS:
            return self.used >= self.budget.amount
        return self.elapsed >= self.budget.amount

    def remaining_evals(self) -> int:
        if self.budget.mode == EVALS:
            return max(0, int(self.budget.amount) - self.used)
        return sys.maxsize

    @property
    def progress(self) -> float:
        """Consumption in the budget's own unit."""
        return self.used if self.budget.mode == EVALS else self.elapsed


@dataclass(frozen=True)
class AlgoConfig:
    population_size: int = 100
    noise_rate: float = 0.10
    kappa: float = 0.05
    mix: OperatorMix = field(default_factory=OperatorMix)
    step_fraction: float = 0.005
    delta: float = 0.8
    ls_population: int = 30

    def __post_init__(self) -> None:
        if self.population_size < 2:
            raise ValueError("population size must be at least 2")
        if self.ls_population < 2:
            raise ValueError("local search population must be at least 2")
        if not 0.5 <= self.delta <= 1.0:
            raise ValueError("delta must lie in [0.5, 1]")
        if not 0.0 < self.step_fraction < 1.0:
            raise ValueError("step fraction must lie in (0, 1)")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if not 0.0 <= self.noise_rate <= 1.0:
            raise ValueError("noise rate must lie in [0, 1]")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "AlgoConfig":
        data = dict(data)
        if "mix" in data and isinstance(data["mix"], dict):
            data["mix"] = OperatorMix(**data["mix"])
        return cls(**data)

    def with_overrides(self, **changes: Any) -> "AlgoConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


@dataclass(frozen=True)
class InstanceDefaults:
    ibmols_population: int
    noise_rate: float
    ibea_population: int | None
    nsga2_population: int | None
    seconds: float


# stand-alone parameter table and running times per benchmark instance
INSTANCE_DEFAULTS: dict[str, InstanceDefaults] = {
    "eil51": InstanceDefaults(20, 0.10, 100, 100, 20),
    "st70": InstanceDefaults(20, 0.10, 50, 100, 60),
    "kroA100": InstanceDefaults(30, 0.10, 100, 200, 120),
    "bier127": InstanceDefaults(30, 0.10, 100, 200, 300),
    "kroA150": InstanceDefaults(30, 0.10, 200, 200, 600),
    "kroA200": InstanceDefaults(30, 0.10, 200, 200, 1200),
    "pr264": InstanceDefaults(30, 0.20, 50, 200, 1800),
    "pr299": InstanceDefaults(50, 0.10, 50, 200, 3000),
    "pr439": InstanceDefaults(70, 0.10, None, None, 4200),
    "pr1002": InstanceDefaults(100, 0.10, None, None, 6000),
}

LS_FALLBACK_POPULATION = 30
EA_FALLBACK_POPULATION = 100
SEEA_POPULATION = 100


def default_config(algorithm: str, instance_name: str, n: int) -> AlgoConfig:
    row = INSTANCE_DEFAULTS.get(instance_name)
    noise = row.noise_rate if row else 0.10
    if algorithm == "ibmols":
        pop = row.ibmols_population if row else LS_FALLBACK_POPULATION
    elif algorithm == "ibea":
        pop = (row.ibea_population if row else None) or EA_FALLBACK_POPULATION
    elif algorithm == "nsga2":
        pop = (row.nsga2_population if row else None) or EA_FALLBACK_POPULATION
    else:
        pop = SEEA_POPULATION
    ls_pop = 20 if n < 100 else 30
    return AlgoConfig(population_size=pop, noise_rate=noise, ls_population=ls_pop)


def default_budget(instance_name: str) -> Budget | None:
    row = INSTANCE_DEFAULTS.get(instance_name)
    return Budget(SECONDS, row.seconds) if row else None


@dataclass
class RunRecord:
    algorithm: str
    instance: str
    seed: int
    config: AlgoConfig
    budget: Budget
    evaluations: int
    elapsed_seconds: float
    # (f1, f2, keys) per archive point, sorted by f1
    front: list[tuple[int, int, list[float]]]
    cost_model: str = "plain"
    launches_ls: int | None = None
    trace: list[dict[str, Any]] = field(default_factory=list)

    def vectors(self) -> list[tuple[int, int]]:
        return [(f1, f2) for f1, f2, _ in self.front]
