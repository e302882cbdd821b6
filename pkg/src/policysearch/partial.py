"""Partial states, partial-state policies and their decompressed meaning."""
from __future__ import annotations

from itertools import product
from typing import Iterable, Iterator, Mapping

from .core import FondTask, State
from .errors import InvalidInput, OracleTooLarge
from .policy import Policy


class PartialState:
    """A partial truth assignment, as a mask of facts set true and one set false."""

    __slots__ = ("pos", "neg")

    def __init__(self, pos: int = 0, neg: int = 0):
        if pos & neg:
            raise InvalidInput("a fact cannot be assigned both values")
        self.pos = pos
        self.neg = neg

    @classmethod
    def from_literals(cls, literals: Iterable[tuple[int, bool]]) -> PartialState:
        pos = neg = 0
        for fact, value in literals:
            bit = 1 << fact
            if (pos | neg) & bit:
                raise InvalidInput(f"fact {fact} assigned twice")
            if value:
                pos |= bit
            else:
                neg |= bit
        return cls(pos, neg)

    def models(self, state: State) -> bool:
        return self.matches(state.bits)

    def matches(self, bits: int) -> bool:
        return bits & self.pos == self.pos and not bits & self.neg

    def literals(self) -> list[tuple[int, bool]]:
        out = []
        mask = self.pos | self.neg
        while mask:
            low = mask & -mask
            f = low.bit_length() - 1
            out.append((f, bool(self.pos & low)))
            mask ^= low
        return out

    def __len__(self):
        return (self.pos | self.neg).bit_count()

    def sort_key(self):
        return len(self), self.literals()

    def __eq__(self, other):
        return isinstance(other, PartialState) and self.pos == other.pos and self.neg == other.neg

    def __hash__(self):
        return hash((self.pos, self.neg))

    def __repr__(self):
        return "PartialState(" + ", ".join(f"{f}={int(v)}" for f, v in self.literals()) + ")"


class PartialPolicy:
    """A mapping from partial states to action ids."""

    def __init__(self, rules: Mapping[PartialState, int] | Iterable[tuple[PartialState, int]] = ()):
        self.rules: dict[PartialState, int] = dict(rules)

    def __len__(self):
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def items(self):
        return self.rules.items()

    def actions_at(self, state: State) -> set[int]:
        """The set ``τ[s]`` of actions of every rule ``state`` models."""
        return {a for p, a in self.rules.items() if p.models(state)}

    def lookup(self, state: State) -> int | None:
        acts = self.actions_at(state)
        return next(iter(acts)) if len(acts) == 1 else None

    def is_buggy(self, state: State) -> bool:
        return len(self.actions_at(state)) >= 2

    def sorted_rules(self) -> list[tuple[PartialState, int]]:
        return sorted(self.rules.items(), key=lambda r: (r[0].sort_key(), r[1]))


class Decompressed:
    """Lazy state-level view of a partial policy; nothing is enumerated up front."""

    def __init__(self, task: FondTask, tau: PartialPolicy):
        self.task = task
        self.tau = tau

    def action(self, state: State) -> int | None:
        """The mapped action, or None for unmapped, buggy and goal states."""
        if self.task.is_goal(state):
            return None
        return self.tau.lookup(state)

    def is_buggy(self, state: State) -> bool:
        return self.tau.is_buggy(state)


def decompress(task: FondTask, tau: PartialPolicy) -> Decompressed:
    return Decompressed(task, tau)


def all_states(task: FondTask, max_facts: int = 20) -> Iterator[State]:
    if task.num_facts > max_facts:
        raise OracleTooLarge(f"{task.num_facts} facts")
    for bits in range(1 << task.num_facts):
        yield task.state(bits)


def enumerate_decompressed(task: FondTask, tau: PartialPolicy) -> tuple[dict[State, int], set[State]]:
    """Brute-force decompression over every assignment of the task's facts."""
    mapping, buggy = {}, set()
    for s in all_states(task):
        acts = {a for p, a in tau.items() if p.models(s)}
        if len(acts) >= 2:
            buggy.add(s)
        elif len(acts) == 1 and not task.is_goal(s):
            mapping[s] = next(iter(acts))
    return mapping, buggy


def pruned_policy(task: FondTask, tau: PartialPolicy) -> tuple[Policy | None, bool]:
    """Slice of the decompressed policy to what it reaches from init.

    Returns ``(policy, clean)``; ``clean`` is False when a buggy state is
    reached, and the policy is None when a reached rule is not applicable.
    """
    view = decompress(task, tau)
    mapping = {}
    seen = {task.init}
    stack = [task.init]
    clean = True
    while stack:
        s = stack.pop()
        if view.is_buggy(s):
            clean = False
            continue
        a = view.action(s)
        if a is None:
            continue
        if not task.applicable(s, a):
            return None, clean
        mapping[s] = a
        for t in task.successor_list(s, a):
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return Policy.from_mapping(task, mapping), clean


def validate_partial_solution(task: FondTask, tau: PartialPolicy) -> bool:
    pruned, clean = pruned_policy(task, tau)
    return clean and pruned is not None and pruned.is_solution()


def literal_product(num_facts: int) -> Iterator[PartialState]:
    """Every partial state over ``num_facts`` facts (3^n of them)."""
    for values in product((None, True, False), repeat=num_facts):
        pos = neg = 0
        for f, v in enumerate(values):
            if v is True:
                pos |= 1 << f
            elif v is False:
                neg |= 1 << f
        yield PartialState(pos, neg)
