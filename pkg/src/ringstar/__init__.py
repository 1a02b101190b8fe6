"""Bi-objective ring star problem: model, search algorithms and assessment tools."""

from ringstar.core import RingSolution, brute_force_front, decode, encode, evaluate
from ringstar.instance import CostModel, Instance, load_instance, parse_tsplib, random_instance

__version__ = "0.1.0"

__all__ = [
    "CostModel", "Instance", "RingSolution", "brute_force_front", "decode", "encode", "evaluate",
    "load_instance", "parse_tsplib", "random_instance",
]
