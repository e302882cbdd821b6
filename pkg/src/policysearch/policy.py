"""Immutable state policies with incrementally maintained reach/front/remain."""
from __future__ import annotations

from collections import deque
from typing import Iterable, Mapping

from .core import FondTask, State
from .errors import AlreadyMapped, GoalStateMapped, NotApplicable, NotInDomain


class Policy:
    """A partial mapping from non-goal states to applicable actions.

    ``front`` and ``remain`` are insertion-ordered dicts used as ordered sets;
    the last key of ``remain`` is the most recently added open state.
    Instances are never mutated after construction apart from the lazily
    filled escape-set memo, whose content is a pure function of the policy.
    """

    __slots__ = ("task", "mapping", "reach", "front", "remain", "proper", "_escape", "_hash")

    def __init__(self, task, mapping, reach, front, remain, proper):
        self.task: FondTask = task
        self.mapping: dict[State, int] = mapping
        self.reach: frozenset[State] = reach
        self.front: dict[State, None] = front
        self.remain: dict[State, None] = remain
        self.proper: bool = proper
        self._escape: dict[State, frozenset[State]] = {}
        self._hash = None

    @classmethod
    def empty(cls, task: FondTask) -> Policy:
        remain = {} if task.is_goal(task.init) else {task.init: None}
        return cls(task, {}, frozenset(), {}, remain, True)

    @classmethod
    def from_mapping(cls, task: FondTask, mapping: Mapping[State, int] | Iterable) -> Policy:
        """Build a policy and all its caches from scratch (the reference path)."""
        mapping = dict(mapping)
        for s, a in mapping.items():
            if task.is_goal(s):
                raise GoalStateMapped(task.describe(s))
            if not task.applicable(s, a):
                raise NotApplicable(f"{task.actions[a].name} at {task.describe(s)}")
        reach = set(mapping)
        front: dict[State, None] = {}
        for s, a in mapping.items():
            for t in task.successor_list(s, a):
                reach.add(t)
                if t not in mapping:
                    front[t] = None
        remain: dict[State, None] = {}
        init = task.init
        if not task.is_goal(init) and init not in mapping:
            remain[init] = None
        for t in front:
            if not task.is_goal(t):
                remain[t] = None
        proper = len(_states_reaching_front(task, mapping, front)) == len(mapping)
        return cls(task, mapping, frozenset(reach), front, remain, proper)

    # -- basic views -----------------------------------------------------

    @property
    def domain(self):
        return self.mapping.keys()

    @property
    def g(self) -> int:
        return len(self.mapping)

    def __len__(self):
        return len(self.mapping)

    def __getitem__(self, state: State) -> int:
        return self.mapping[state]

    def __contains__(self, state: State) -> bool:
        return state in self.mapping

    def __eq__(self, other):
        return isinstance(other, Policy) and self.mapping == other.mapping

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.mapping.items()))
        return self._hash

    def items(self):
        return self.mapping.items()

    def is_proper(self) -> bool:
        return self.proper

    def is_solution(self) -> bool:
        return self.proper and not self.remain

    def most_recent_open(self) -> State | None:
        return next(reversed(self.remain)) if self.remain else None

    # -- extension -------------------------------------------------------

    def _check_extension(self, state: State, action: int):
        if state in self.mapping:
            raise AlreadyMapped(self.task.describe(state))
        if self.task.is_goal(state):
            raise GoalStateMapped(self.task.describe(state))
        if not self.task.applicable(state, action):
            raise NotApplicable(f"{self.task.actions[action].name} at {self.task.describe(state)}")

    def extend(self, state: State, action: int) -> Policy:
        """Return ``self ⊔ {state ↦ action}`` with caches updated incrementally."""
        self._check_extension(state, action)
        task = self.task
        succs = task.successor_list(state, action)
        mapping = dict(self.mapping)
        mapping[state] = action
        front = dict(self.front)
        front.pop(state, None)
        remain = dict(self.remain)
        remain.pop(state, None)
        for t in succs:
            if t not in mapping and t not in front:
                front[t] = None
                if not task.is_goal(t):
                    remain[t] = None
        reach = self.reach.union(succs, (state,))
        proper = self.proper and _reaches_front(task, mapping, front, state)
        return Policy(task, mapping, reach, front, remain, proper)

    def deadlock_on_extend(self, state: State, action: int) -> bool:
        """True iff mapping ``state`` to ``action`` makes this proper policy improper.

        Existing domain states that reached ``state`` still reach front
        through it iff ``state`` itself does, so only ``state`` needs a search.
        """
        self._check_extension(state, action)
        mapping = dict(self.mapping)
        mapping[state] = action
        front = dict(self.front)
        front.pop(state, None)
        for t in self.task.successor_list(state, action):
            if t not in mapping:
                front[t] = None
        return not _reaches_front(self.task, mapping, front, state)

    # -- escape sets and lanes --------------------------------------------

    def escape_set(self, state: State) -> frozenset[State]:
        if state not in self.mapping:
            raise NotInDomain(self.task.describe(state))
        found = self._escape.get(state)
        if found is None:
            out = set()
            seen = {state}
            stack = [state]
            while stack:
                u = stack.pop()
                for t in self.task.successor_list(u, self.mapping[u]):
                    if t in seen:
                        continue
                    seen.add(t)
                    if t in self.mapping:
                        stack.append(t)
                    else:
                        out.add(t)
            found = self._escape[state] = frozenset(out)
        return found

    def lanes(self) -> dict[State, frozenset[State]]:
        return {s: self.escape_set(s) for s in self.mapping}

    def slice(self, states: Iterable[State]) -> Policy:
        keep = set(states)
        return Policy.from_mapping(self.task, {s: a for s, a in self.mapping.items() if s in keep})

    def describe(self) -> str:
        names = self.task
        parts = [f"{names.describe(s)}->{names.actions[a].name}" for s, a in sorted(self.mapping.items())]
        return "{" + ", ".join(parts) + "}"

    def __repr__(self):
        return f"Policy({self.describe()})"


def _reaches_front(task, mapping, front, start) -> bool:
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for t in task.successor_list(u, mapping[u]):
            if t in front:
                return True
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return False


def _states_reaching_front(task, mapping, front) -> set[State]:
    """Domain states with a policy trajectory into ``front`` (backward search)."""
    preds: dict[State, list[State]] = {}
    for s, a in mapping.items():
        for t in task.successor_list(s, a):
            preds.setdefault(t, []).append(s)
    good: set[State] = set()
    queue = deque(front)
    while queue:
        t = queue.popleft()
        for s in preds.get(t, ()):
            if s not in good:
                good.add(s)
                queue.append(s)
    return good
