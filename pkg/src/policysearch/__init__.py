"""Policy-space search for fully observable non-deterministic planning."""

from .core import Action, Effect, Fact, FondTask, State, Transition
from .explicit import parse_explicit, write_explicit
from .pddl import parse_pddl, write_pddl
from .policy import Policy
from .partial import PartialPolicy, PartialState, decompress, validate_partial_solution
from .concretizer import concretize
from .heuristics import Algorithm, ClassicalHeuristic, StubHeuristic, delta, delta_nearest, f_value
from .search import SearchConfig, SearchResult, SearchStats, and_star, run_planner, signature
from .compressor import compress
from .validator import verify_strong_cyclic

__all__ = [
    "Action", "Effect", "Fact", "FondTask", "State", "Transition",
    "parse_explicit", "write_explicit", "parse_pddl", "write_pddl",
    "Policy", "PartialPolicy", "PartialState", "decompress", "validate_partial_solution",
    "concretize", "Algorithm", "ClassicalHeuristic", "StubHeuristic", "delta", "delta_nearest",
    "f_value", "SearchConfig", "SearchResult", "SearchStats", "and_star", "run_planner",
    "signature", "compress", "verify_strong_cyclic",
]
