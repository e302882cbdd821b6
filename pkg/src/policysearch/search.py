"""Best-first search in policy space with equivalence pruning."""
from __future__ import annotations

import heapq
import itertools
import time
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

from .concretizer import concretize
from .core import FondTask, State
from .errors import InvalidInput, ResourceLimit
from .heuristics import INF, Algorithm, ClassicalHeuristic, HFunc, f_value
from .policy import Policy

PRUNINGS = ("identity", "lanes", "domain_frontier", "frontier", "frontier_symmetric")
GOAL = "<goal>"

Selector = Callable[[Policy], State]


@dataclass
class SearchConfig:
    pruning: str = "domain_frontier"
    algorithm: Algorithm = field(default_factory=Algorithm)
    deadlock_detection: bool = False
    use_concretizer: bool = True
    goal_merging: bool = True
    max_policies: int | None = None
    time_limit: float | None = None
    selector: Selector | None = None
    symmetry: object | None = None
    debug_unique: bool = False

    def __post_init__(self):
        self.pruning = self.pruning.replace("-", "_")
        if self.pruning == "frontier_sym":
            self.pruning = "frontier_symmetric"
        if self.pruning not in PRUNINGS:
            raise InvalidInput(f"unknown pruning {self.pruning!r}")

    def fingerprint(self) -> str:
        parts = [
            self.pruning,
            str(self.algorithm),
            "dld" if self.deadlock_detection else "nodld",
            "conc" if self.use_concretizer else "noconc",
            "gm" if self.goal_merging else "nogm",
        ]
        return "/".join(parts)


@dataclass
class SearchStats:
    generated: int = 0
    expanded: int = 0
    pruned_by_equivalence: int = 0
    pruned_by_deadlock: int = 0
    solutions_from_concretizer: int = 0
    time: float = 0.0

    def add(self, other: SearchStats) -> SearchStats:
        return SearchStats(
            self.generated + other.generated,
            self.expanded + other.expanded,
            self.pruned_by_equivalence + other.pruned_by_equivalence,
            self.pruned_by_deadlock + other.pruned_by_deadlock,
            self.solutions_from_concretizer + other.solutions_from_concretizer,
            self.time + other.time,
        )


@dataclass
class SearchResult:
    policy: Policy | None
    stats: SearchStats
    backup_used: bool = False

    @property
    def solved(self) -> bool:
        return self.policy is not None


def scripted_selector(order: Sequence[State]) -> Selector:
    """Map the first scripted state that is open; otherwise the newest open state."""

    def select(policy: Policy) -> State:
        for s in order:
            if s in policy.remain:
                return s
        return policy.most_recent_open()

    return select


def expand(task: FondTask, policy: Policy, selector: Selector | None = None) -> list[Policy]:
    if not policy.remain:
        return []
    state = selector(policy) if selector else policy.most_recent_open()
    return [policy.extend(state, a) for a in task.applicable_actions(state)]


def _merged(task: FondTask, states, merge: bool):
    if not merge:
        return frozenset(states)
    out = set()
    for s in states:
        out.add(GOAL if task.is_goal(s) else s)
    return frozenset(out)


def signature(policy: Policy, kind: str, symmetry=None, goal_merging: bool = True):
    task = policy.task
    if kind == "identity":
        return frozenset(policy.mapping.items())
    if kind == "lanes":
        return frozenset((s, _merged(task, esc, goal_merging)) for s, esc in policy.lanes().items())
    if kind == "domain_frontier":
        return frozenset(policy.mapping), _merged(task, policy.front, goal_merging)
    if kind == "frontier":
        return _merged(task, policy.front, goal_merging)
    if kind == "frontier_symmetric":
        if symmetry is None:
            raise InvalidInput("symmetric frontier pruning needs a symmetry context")
        counts = Counter(
            GOAL if goal_merging and task.is_goal(s) else symmetry.signature(s) for s in policy.front
        )
        if goal_merging and counts[GOAL] > 1:
            counts[GOAL] = 1
        return frozenset(counts.items())
    raise InvalidInput(f"unknown pruning {kind!r}")


def and_star(task: FondTask, config: SearchConfig | None = None, heuristic: HFunc | None = None) -> SearchResult:
    config = config or SearchConfig()
    h = heuristic or ClassicalHeuristic(task, "hmax")
    symmetry = config.symmetry
    if config.pruning == "frontier_symmetric" and symmetry is None:
        from .symmetry import SymmetryContext

        symmetry = SymmetryContext.build(task, "canonical")
    stats = SearchStats()
    start = time.perf_counter()
    deadline = start + config.time_limit if config.time_limit is not None else None
    counter = itertools.count()
    seen_policies: set[Policy] | None = set() if config.debug_unique else None

    def stop(kind):
        stats.time = time.perf_counter() - start
        raise ResourceLimit(kind, stats)

    root = Policy.empty(task)
    stats.generated = 1
    queue: list = []
    root_f = f_value(root, config.algorithm, h)
    if root_f != INF:
        queue.append((root_f, 0, next(counter), root))
    done = set()
    result = None
    while queue:
        if deadline is not None and time.perf_counter() > deadline:
            stop("time-limit")
        _, _, _, policy = heapq.heappop(queue)
        if policy.is_solution():
            result = policy
            break
        if not policy.remain:
            if config.use_concretizer:
                found = concretize(task, policy.domain, policy.front)
                if found is not None:
                    stats.solutions_from_concretizer += 1
                    result = found
                    break
            continue
        key = signature(policy, config.pruning, symmetry, config.goal_merging)
        if key in done:
            stats.pruned_by_equivalence += 1
            continue
        done.add(key)
        stats.expanded += 1
        for child in expand(task, policy, config.selector):
            stats.generated += 1
            if config.max_policies is not None and stats.generated > config.max_policies:
                stop("policy-limit")
            if seen_policies is not None:
                if child in seen_policies:
                    raise AssertionError(f"policy generated twice: {child.describe()}")
                seen_policies.add(child)
            if config.deadlock_detection and not child.proper:
                stats.pruned_by_deadlock += 1
                continue
            fv = f_value(child, config.algorithm, h)
            if fv == INF:
                continue
            heapq.heappush(queue, (fv, -child.g, next(counter), child))
    stats.time = time.perf_counter() - start
    return SearchResult(result, stats)


def run_planner(task: FondTask, config: SearchConfig | None = None, heuristic: HFunc | None = None) -> SearchResult:
    """Search once; frontier-style pruning falls back to domain-frontier on ⊥."""
    config = config or SearchConfig()
    first = and_star(task, config, heuristic)
    if first.solved or config.pruning not in ("frontier", "frontier_symmetric"):
        return first
    backup = and_star(task, replace(config, pruning="domain_frontier"), heuristic)
    return SearchResult(backup.policy, first.stats.add(backup.stats), backup_used=True)
