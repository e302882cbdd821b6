"""Classical estimates on the all-outcomes determinization, and policy f-values."""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .core import FondTask, State
from .errors import InvalidInput, InvalidWeight
from .policy import Policy

INF = math.inf
KINDS = ("blind", "hmax", "hadd")


class ClassicalHeuristic:
    """``blind``, ``hmax`` or ``hadd`` with a per-state memo.

    Every effect of an action becomes a deterministic unit-cost action with the
    same precondition, so an action reaches the union of its effects' adds.
    """

    def __init__(self, task: FondTask, kind: str = "hmax"):
        if kind not in KINDS:
            raise InvalidInput(f"unknown heuristic {kind!r}")
        self.task = task
        self.kind = kind
        self._memo: dict[int, float] = {}
        n = task.num_facts
        self._pre_of: list[list[int]] = [[] for _ in range(n)]
        self._pre_len = []
        self._adds = []
        self._free = []
        for a in task.actions:
            for f in a.pre:
                self._pre_of[f].append(a.id)
            self._pre_len.append(len(a.pre))
            adds = set()
            for e in a.effects:
                adds |= e.add
            self._adds.append(tuple(sorted(adds)))
            if not a.pre:
                self._free.append(a.id)

    def __call__(self, state: State) -> float:
        found = self._memo.get(state.bits)
        if found is None:
            found = self._memo[state.bits] = self._compute(state)
        return found

    def _compute(self, state: State) -> float:
        task = self.task
        if task.is_goal(state):
            return 0
        if self.kind == "blind":
            return 1
        additive = self.kind == "hadd"
        cost: dict[int, float] = {f: 0 for f in state.true_facts()}
        heap = [(0, f) for f in cost]
        unsat = list(self._pre_len)
        pcost = [0] * len(unsat)
        goal_left = set(task.goal) - set(cost)
        closed: set[int] = set()

        def fire(a, base):
            c = base + 1
            for g in self._adds[a]:
                if c < cost.get(g, INF):
                    cost[g] = c
                    heapq.heappush(heap, (c, g))

        for a in self._free:
            fire(a, 0)
        while heap and goal_left:
            c, f = heapq.heappop(heap)
            if f in closed:
                continue
            closed.add(f)
            goal_left.discard(f)
            for a in self._pre_of[f]:
                unsat[a] -= 1
                pcost[a] = pcost[a] + c if additive else max(pcost[a], c)
                if unsat[a] == 0:
                    fire(a, pcost[a])
        if goal_left:
            return INF
        values = [cost[g] for g in task.goal]
        return sum(values) if additive else max(values)


class StubHeuristic:
    """Fixed per-state values, for injecting hand-picked estimates."""

    def __init__(self, values: Mapping[State, float], default: float = 0):
        self.values = dict(values)
        self.default = default

    def __call__(self, state: State) -> float:
        return self.values.get(state, self.default)


HFunc = Callable[[State], float]


def delta(values: Iterable[float]) -> float:
    """max over j of (j + the (j+1)-th largest value); 0 for no values."""
    ordered = sorted(values, reverse=True)
    best = 0
    for j, v in enumerate(ordered):
        best = max(best, j + v)
    return best


def delta_nearest(policy: Policy, h: HFunc) -> float:
    open_states = list(policy.domain) + list(policy.remain)
    n = len(open_states)
    best = max(n, delta(h(s) for s in open_states))
    if policy.mapping and policy.front:
        best = max(best, n - 1 + min(h(s) for s in policy.front))
    return best


@dataclass(frozen=True)
class Algorithm:
    """Search mode: ``astar``, ``wastar`` with weight ``k > 1``, or ``gbfs``."""

    kind: str = "astar"
    weight: float = 1

    def __post_init__(self):
        if self.kind not in ("astar", "wastar", "gbfs"):
            raise InvalidInput(f"unknown algorithm {self.kind!r}")
        if self.kind == "wastar" and not self.weight > 1:
            raise InvalidWeight(f"weighted A* needs k > 1, got {self.weight}")

    @classmethod
    def parse(cls, text: str) -> Algorithm:
        if text.startswith("wastar"):
            _, _, k = text.partition(":")
            try:
                weight = float(k) if k else 2.0
            except ValueError:
                raise InvalidWeight(f"bad weight {k!r}") from None
            if weight.is_integer():
                weight = int(weight)
            return cls("wastar", weight)
        return cls(text)

    def __str__(self):
        return f"wastar:{self.weight}" if self.kind == "wastar" else self.kind


def f_value(policy: Policy, algorithm: Algorithm, h: HFunc) -> float:
    value = delta_nearest(policy, h)
    if algorithm.kind == "astar" or value == INF:
        return value
    g = policy.g
    if algorithm.kind == "gbfs":
        return value - g
    return g + algorithm.weight * (value - g)
