"""Turn a hollow policy ⟨D, F⟩ into a proper policy over D, or prove none exists.

States are handled backwards from F: a state may be mapped to an action once
every outcome stays inside D ⊔ F and at least one outcome is already handled
(in F or mapped earlier).  Mapping in that order can never close a cycle
without an exit, and if no state can be handled the rest are provably stuck.
"""
from __future__ import annotations

import heapq
from typing import Callable, Iterable, Sequence

from .core import FondTask, State
from .errors import InvalidInput
from .policy import Policy

Chooser = Callable[[Sequence[tuple[State, int]]], tuple[State, int]]


def _check(task: FondTask, D: set[State], F: set[State]):
    if D & F:
        raise InvalidInput("domain and frontier of a hollow policy must be disjoint")
    for s in D:
        if task.is_goal(s):
            raise InvalidInput(f"goal state {task.describe(s)} cannot be mapped")


def concretize(task: FondTask, D: Iterable[State], F: Iterable[State]) -> Policy | None:
    """Worklist implementation; returns None when no proper policy exists.

    Among the currently admissible (state, action) pairs it always takes the
    smallest state and then the smallest action id.
    """
    D, F = set(D), set(F)
    _check(task, D, F)
    R = D | F
    watchers: dict[State, list[tuple[int, int, State]]] = {}
    heap: list[tuple[int, int, State]] = []
    for s in D:
        for a in task.applicable_actions(s):
            succ = task.successor_list(s, a)
            if not all(t in R for t in succ):
                continue
            entry = (s.bits, a, s)
            if any(t in F for t in succ):
                heap.append(entry)
            else:
                for t in succ:
                    watchers.setdefault(t, []).append(entry)
    heapq.heapify(heap)

    mapping: dict[State, int] = {}
    while len(mapping) < len(D):
        while heap and heap[0][2] in mapping:
            heapq.heappop(heap)
        if not heap:
            return None
        _, a, s = heapq.heappop(heap)
        mapping[s] = a
        for entry in watchers.pop(s, ()):
            if entry[2] not in mapping:
                heapq.heappush(heap, entry)
    return Policy.from_mapping(task, mapping)


def concretize_naive(
    task: FondTask, D: Iterable[State], F: Iterable[State], chooser: Chooser | None = None
) -> Policy | None:
    """Reference version that rescans all candidates each round.

    ``chooser`` picks among the admissible pairs; by default the smallest
    state and then the smallest action, matching :func:`concretize`.
    """
    D, F = set(D), set(F)
    _check(task, D, F)
    R = D | F
    handled: set[State] = set()
    mapping: dict[State, int] = {}
    while len(mapping) < len(D):
        done = F | handled
        candidates = [
            (s, a)
            for s in sorted(D - handled)
            for a in task.applicable_actions(s)
            if set(task.successor_list(s, a)) <= R
            and any(t in done for t in task.successor_list(s, a))
        ]
        if not candidates:
            return None
        s, a = chooser(candidates) if chooser else candidates[0]
        mapping[s] = a
        handled.add(s)
    return Policy.from_mapping(task, mapping)
