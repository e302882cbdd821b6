"""Grounded FOND tasks: facts, states, non-deterministic actions, transitions."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import InvalidInput, NotApplicable


class State:
    """A complete truth assignment, stored as a bit vector over fact ids.

    Bit ``i`` of ``bits`` is fact ``i``.  States are totally ordered by the
    integer value of ``bits``, i.e. lexicographically with the highest fact id
    as the most significant position.  That order is what "minimum state"
    means everywhere in the package.
    """

    __slots__ = ("bits", "width", "_hash")

    def __init__(self, bits: int, width: int):
        self.bits = bits
        self.width = width
        self._hash = hash(bits)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return isinstance(other, State) and self.bits == other.bits

    def __lt__(self, other: State):
        return self.bits < other.bits

    def __le__(self, other: State):
        return self.bits <= other.bits

    def __gt__(self, other: State):
        return self.bits > other.bits

    def __ge__(self, other: State):
        return self.bits >= other.bits

    def __contains__(self, fact: int):
        return bool(self.bits >> fact & 1)

    def true_facts(self) -> Iterator[int]:
        bits = self.bits
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low

    def __repr__(self):
        return f"State({sorted(self.true_facts())})"


@dataclass(frozen=True)
class Fact:
    id: int
    name: str
    partition_id: int = 0


@dataclass(frozen=True)
class Effect:
    delete: frozenset[int]
    add: frozenset[int]

    def __post_init__(self):
        if self.delete & self.add:
            raise InvalidInput(f"effect deletes and adds {sorted(self.delete & self.add)}")


@dataclass(frozen=True)
class Action:
    id: int
    name: str
    pre: frozenset[int]
    effects: tuple[Effect, ...]
    partition_id: int = 0

    def __post_init__(self):
        if not self.effects:
            raise InvalidInput(f"action {self.name} has no effects")


@dataclass(frozen=True)
class Transition:
    head: State
    action: int
    tail: State


def mask_of(facts: Iterable[int]) -> int:
    mask = 0
    for f in facts:
        mask |= 1 << f
    return mask


class FondTask:
    """An immutable grounded task ``<F, I, G, A>``.

    ``state_names`` is only set for tasks read from the explicit-graph format;
    it maps state bit patterns to the names used in the source document.
    """

    def __init__(
        self,
        facts: Sequence[Fact],
        actions: Sequence[Action],
        init: Iterable[int] | State,
        goal: Iterable[int],
        state_names: Mapping[int, str] | None = None,
        name: str = "",
    ):
        self.facts = tuple(facts)
        self.actions = tuple(actions)
        self.name = name
        n = len(self.facts)
        for i, fact in enumerate(self.facts):
            if fact.id != i:
                raise InvalidInput(f"fact ids must be contiguous, got {fact.id} at {i}")
        for i, action in enumerate(self.actions):
            if action.id != i:
                raise InvalidInput(f"action ids must be contiguous, got {action.id} at {i}")
            used = set(action.pre)
            for eff in action.effects:
                used |= eff.delete | eff.add
            if any(f < 0 or f >= n for f in used):
                raise InvalidInput(f"action {action.name} references an unknown fact")
        self.goal = frozenset(goal)
        if any(f < 0 or f >= n for f in self.goal):
            raise InvalidInput("goal references an unknown fact")

        self._states: dict[int, State] = {}
        init_bits = init.bits if isinstance(init, State) else mask_of(init)
        self.init = self.state(init_bits)
        self.goal_mask = mask_of(self.goal)
        self._pre = [mask_of(a.pre) for a in self.actions]
        self._eff = [
            tuple((~mask_of(e.delete), mask_of(e.add)) for e in a.effects) for a in self.actions
        ]
        self._succ: dict[tuple[int, int], tuple[State, ...]] = {}
        self._app: dict[int, tuple[int, ...]] = {}
        self.state_names = dict(state_names) if state_names else None
        self.fact_index = {f.name: f.id for f in self.facts}
        self.action_index = {a.name: a.id for a in self.actions}

    @property
    def num_facts(self) -> int:
        return len(self.facts)

    def state(self, bits: int) -> State:
        st = self._states.get(bits)
        if st is None:
            st = self._states[bits] = State(bits, len(self.facts))
        return st

    def state_from_facts(self, facts: Iterable[int]) -> State:
        return self.state(mask_of(facts))

    def applicable(self, state: State, action: int) -> bool:
        pre = self._pre[action]
        return state.bits & pre == pre

    def applicable_actions(self, state: State) -> tuple[int, ...]:
        found = self._app.get(state.bits)
        if found is None:
            bits = state.bits
            found = tuple(i for i, pre in enumerate(self._pre) if bits & pre == pre)
            self._app[state.bits] = found
        return found

    def successor_list(self, state: State, action: int) -> tuple[State, ...]:
        """Successors in effect declaration order, duplicates removed."""
        key = (state.bits, action)
        found = self._succ.get(key)
        if found is None:
            if not self.applicable(state, action):
                raise NotApplicable(f"{self.actions[action].name} is not applicable in {self.describe(state)}")
            out: list[State] = []
            seen = set()
            for keep, add in self._eff[action]:
                bits = (state.bits & keep) | add
                if bits not in seen:
                    seen.add(bits)
                    out.append(self.state(bits))
            found = self._succ[key] = tuple(out)
        return found

    def successors(self, state: State, action: int) -> frozenset[State]:
        return frozenset(self.successor_list(state, action))

    def is_goal(self, state: State) -> bool:
        return state.bits & self.goal_mask == self.goal_mask

    def transitions(self, state: State) -> Iterator[Transition]:
        for a in self.applicable_actions(state):
            for succ in self.successor_list(state, a):
                yield Transition(state, a, succ)

    def reachable_states(self, start: State | None = None, limit: int | None = None) -> list[State]:
        """All states reachable from ``start`` (default: init) under any action.

        Goal states are not expanded.  Returns states in discovery order; with
        ``limit`` the walk stops once more than ``limit`` states are found, so a
        result longer than ``limit`` signals overflow.
        """
        start = self.init if start is None else start
        seen = {start}
        order = [start]
        i = 0
        while i < len(order):
            s = order[i]
            i += 1
            if self.is_goal(s):
                continue
            for a in self.applicable_actions(s):
                for t in self.successor_list(s, a):
                    if t not in seen:
                        seen.add(t)
                        order.append(t)
                        if limit is not None and len(order) > limit:
                            return order
        return order

    def describe(self, state: State) -> str:
        if self.state_names and state.bits in self.state_names:
            return self.state_names[state.bits]
        return "{" + ", ".join(self.facts[f].name for f in state.true_facts()) + "}"

    def named_state(self, name: str) -> State:
        """Look up a state of an explicit-graph task by its name."""
        if not self.state_names:
            raise KeyError(name)
        for bits, n in self.state_names.items():
            if n == name:
                return self.state(bits)
        raise KeyError(name)

    def action_id(self, name: str) -> int:
        return self.action_index[name]

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for f in self.facts:
            h.update(f"F {f.name} {f.partition_id}\n".encode())
        for a in self.actions:
            effs = ";".join(f"{sorted(e.delete)}/{sorted(e.add)}" for e in a.effects)
            h.update(f"A {a.name} {sorted(a.pre)} {effs} {a.partition_id}\n".encode())
        h.update(f"I {self.init.bits} G {sorted(self.goal)}\n".encode())
        return h.hexdigest()

    def __repr__(self):
        return f"FondTask({self.name!r}, facts={len(self.facts)}, actions={len(self.actions)})"
