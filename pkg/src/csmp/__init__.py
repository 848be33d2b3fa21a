"""Coordinated sliding-motion planning: exact search, reductions and kernelization."""

from .graph import Graph, RootedGraph, contract_edge, degree2_chains, weighted_distance, components, planarity_sanity
from .instance import Instance, parse_instance, serialize_instance, relabel_terminals
from .schedule import Move, Schedule, validate, parse_schedule, serialize_schedule
from .solver import Configuration, SolveResult, solve_optimal, solve_iddfs, solve_bounded_ball, feasibility, successors
from .oracle import oracle_makespan

__version__ = "0.1.0"

__all__ = [
    "Graph", "RootedGraph", "contract_edge", "degree2_chains", "weighted_distance", "components",
    "planarity_sanity", "Instance", "parse_instance", "serialize_instance", "relabel_terminals",
    "Move", "Schedule", "validate", "parse_schedule", "serialize_schedule", "Configuration",
    "SolveResult", "solve_optimal", "solve_iddfs", "solve_bounded_ball", "feasibility", "successors",
    "oracle_makespan",
]
