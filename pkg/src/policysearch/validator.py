"""Independent solution checks and brute-force oracles.

Nothing here uses the policy module: every check recomputes reachability from
the task's transition function, so it can serve as ground truth for the rest
of the package.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .core import FondTask, State
from .errors import OracleTooLarge


@dataclass
class Verdict:
    violations: list[tuple[str, object]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def rules(self) -> set[str]:
        return {rule for rule, _ in self.violations}

    def report(self, task: FondTask) -> str:
        if self.ok:
            return "ok"
        lines = []
        for rule, witness in self.violations:
            what = task.describe(witness) if isinstance(witness, State) else str(witness)
            lines.append(f"{rule}: {what}")
        return "\n".join(lines)


def _as_mapping(policy) -> dict[State, int]:
    if hasattr(policy, "mapping"):
        return dict(policy.mapping)
    return dict(policy)


def verify_strong_cyclic(task: FondTask, policy) -> Verdict:
    """Check that ``policy`` is a solution: applicable, goal-closed, proper, covers init."""
    mapping = _as_mapping(policy)
    verdict = Verdict()
    succ: dict[State, list[State]] = {}
    for s, a in sorted(mapping.items()):
        if task.is_goal(s):
            verdict.violations.append(("goal-mapped", s))
        if not task.applicable(s, a):
            verdict.violations.append(("applicability", s))
            succ[s] = []
            continue
        succ[s] = [t for t in task.successor_list(s, a)]
    outside = sorted({t for ts in succ.values() for t in ts if t not in mapping})
    for t in outside:
        if not task.is_goal(t):
            verdict.violations.append(("goal-closed", t))
    preds: dict[State, list[State]] = {}
    for s, ts in succ.items():
        for t in ts:
            preds.setdefault(t, []).append(s)
    escaping = set()
    queue = deque(outside)
    while queue:
        t = queue.popleft()
        for s in preds.get(t, ()):
            if s not in escaping:
                escaping.add(s)
                queue.append(s)
    for s in sorted(mapping):
        if s not in escaping:
            verdict.violations.append(("properness", s))
    if not task.is_goal(task.init) and task.init not in mapping:
        verdict.violations.append(("init-coverage", task.init))
    return verdict


def _proper_with_front(task: FondTask, mapping: Mapping[State, int], allowed: set[State] | None) -> bool:
    """Every domain state escapes, and (if given) every outside successor is allowed."""
    preds: dict[State, list[State]] = {}
    outside = set()
    for s, a in mapping.items():
        for t in task.successor_list(s, a):
            if t in mapping:
                preds.setdefault(t, []).append(s)
            else:
                if allowed is not None and t not in allowed:
                    return False
                outside.add(t)
                preds.setdefault(t, []).append(s)
    seen = set()
    queue = deque(outside)
    while queue:
        t = queue.popleft()
        for s in preds.get(t, ()):
            if s not in seen:
                seen.add(s)
                queue.append(s)
    return len(seen) == len(mapping)


def brute_force_optimum(task: FondTask, cap: int = 10) -> int | None:
    """Minimum domain size of any solution, or None if the task is unsolvable."""
    if task.is_goal(task.init):
        return 0
    states = [s for s in task.reachable_states(limit=cap + 64) if not task.is_goal(s)]
    if len(states) > cap:
        raise OracleTooLarge(f"{len(states)} reachable non-goal states (cap {cap})")
    options = [(None, *task.applicable_actions(s)) for s in states]
    best = None
    for choice in itertools.product(*options):
        size = sum(a is not None for a in choice)
        if best is not None and size >= best:
            continue
        mapping = {s: a for s, a in zip(states, choice) if a is not None}
        if verify_strong_cyclic(task, mapping).ok:
            best = size
    return best


def brute_force_concretizable(task: FondTask, D: Iterable[State], F: Iterable[State]) -> bool:
    """Whether some proper policy has domain exactly D and frontier inside F."""
    D = sorted(set(D))
    F = set(F)
    options = [task.applicable_actions(s) for s in D]
    for choice in itertools.product(*options):
        if _proper_with_front(task, dict(zip(D, choice)), F):
            return True
    return False


def enumerate_micro_tasks(seed: int = 0, count: int | None = None, **caps):
    """Seeded stream of small explicit-graph tasks (see :mod:`policysearch.microtasks`)."""
    from .microtasks import micro_task_stream

    return micro_task_stream(seed, count, **caps)
