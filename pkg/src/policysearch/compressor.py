"""Compress a state policy into a minimum-size partial-state policy.

For each action the states mapped to it (X) must be covered and every other
domain or frontier state (Y) excluded by a smallest set of partial states.
That set is found by solving a 0-1 program for k = 1, 2, ... partial states.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import ip
from .core import FondTask, State
from .errors import InvalidInput, OracleTooLarge
from .partial import PartialPolicy, PartialState, literal_product
from .policy import Policy


@dataclass(frozen=True)
class CoverInstance:
    X: tuple[int, ...]  # state bit patterns
    Y: tuple[int, ...]
    num_facts: int

    def __post_init__(self):
        if set(self.X) & set(self.Y):
            raise InvalidInput("a state cannot be both covered and excluded")

    @classmethod
    def of_states(cls, X: Sequence[State], Y: Sequence[State], num_facts: int) -> CoverInstance:
        return cls(tuple(sorted(s.bits for s in X)), tuple(sorted(s.bits for s in Y)), num_facts)


def _bit(bits: int, f: int) -> int:
    return bits >> f & 1


def build_simplified(inst: CoverInstance, k: int):
    """The reduced program: literal variables only where some X state agrees.

    Returns the model and, per slot, a dict ``(fact, value) -> variable``.
    """
    model = ip.Model()
    present = {(f, _bit(x, f)) for x in inst.X for f in range(inst.num_facts)}
    slots = []
    for i in range(k):
        lits = {}
        for f, b in sorted(present):
            lits[(f, b)] = model.add_var(1, f"p{i}[{f}={b}]")
        covers = {x: model.add_var(0, f"p{i}[x{j}]") for j, x in enumerate(inst.X)}
        slots.append((lits, covers))
    for x in inst.X:
        model.add_ge(((covers[x], 1) for _, covers in slots), 1)
    for lits, covers in slots:
        for x in inst.X:
            for f in range(inst.num_facts):
                var = lits.get((f, 1 - _bit(x, f)))
                if var is not None:
                    model.add_le([(var, 1), (covers[x], 1)], 1)
        for y in inst.Y:
            model.add_ge(
                ((lits[(f, 1 - _bit(y, f))], 1) for f in range(inst.num_facts) if (f, 1 - _bit(y, f)) in lits),
                1,
            )
    return model, [lits for lits, _ in slots]


def build_full(inst: CoverInstance, k: int):
    """The unreduced program with membership variables for X and Y states."""
    model = ip.Model()
    slots = []
    for i in range(k):
        lits = {
            (f, b): model.add_var(1, f"p{i}[{f}={b}]") for f in range(inst.num_facts) for b in (0, 1)
        }
        member = {s: model.add_var(0, f"p{i}[s{j}]") for j, s in enumerate(inst.X + inst.Y)}
        slots.append((lits, member))
    for x in inst.X:
        model.add_ge(((member[x], 1) for _, member in slots), 1)
    for y in inst.Y:
        model.add_eq(((member[y], 1) for _, member in slots), 0)
    for lits, member in slots:
        for s in inst.X + inst.Y:
            wrong = [lits[(f, 1 - _bit(s, f))] for f in range(inst.num_facts)]
            for var in wrong:
                model.add_le([(var, 1), (member[s], 1)], 1)
            model.add_ge([(v, 1) for v in wrong] + [(member[s], 1)], 1)
        for f in range(inst.num_facts):
            model.add_le([(lits[(f, 0)], 1), (lits[(f, 1)], 1)], 1)
    return model, [lits for lits, _ in slots]


def _decode(slots, values) -> list[PartialState]:
    out = []
    for lits in slots:
        pos = neg = 0
        for (f, b), var in lits.items():
            if values[var]:
                if b:
                    pos |= 1 << f
                else:
                    neg |= 1 << f
        if pos & neg:
            continue  # contradictory slot models nothing
        out.append(PartialState(pos, neg))
    return out


def solve_cover(inst: CoverInstance, k: int, full: bool = False, node_budget: int | None = None):
    """Exactly ``k`` slots; returns ``(partial states, objective)`` or None if infeasible."""
    if k < 1:
        raise InvalidInput("k must be at least 1")
    model, slots = (build_full if full else build_simplified)(inst, k)
    sol = ip.solve(model, node_budget)
    if not sol.feasible:
        return None
    return _decode(slots, sol.values), sol.objective


def minimum_cover(inst: CoverInstance, node_budget: int | None = None) -> list[PartialState]:
    """Smallest set of partial states covering X and excluding Y."""
    if not inst.X:
        return []
    k = 1
    while True:
        found = solve_cover(inst, k, node_budget=node_budget)
        if found is not None:
            parts = []
            for p in found[0]:
                if p not in parts and any(p.matches(x) for x in inst.X):
                    parts.append(p)
            return parts
        k += 1
        if k > len(inst.X):
            raise AssertionError("cover with one partial state per covered state must exist")


def compress(task: FondTask, policy: Policy, node_budget: int | None = None, action_order=None) -> PartialPolicy:
    tau = PartialPolicy()
    used = sorted(set(policy.mapping.values())) if action_order is None else list(action_order)
    for a in used:
        X = [s for s, b in policy.items() if b == a]
        if not X:
            continue
        Y = [s for s, b in policy.items() if b != a] + list(policy.front)
        inst = CoverInstance.of_states(X, Y, task.num_facts)
        for p in minimum_cover(inst, node_budget):
            tau.rules[p] = a
    return tau


def _valid_covers(inst: CoverInstance, present_only: bool = False) -> dict[int, int]:
    """Cover mask over X -> fewest literals, for every partial state excluding Y.

    With ``present_only`` a partial state may only use literals that hold in
    some X state, as in the simplified program.
    """
    if inst.num_facts > 6 or len(inst.X) > 12:
        raise OracleTooLarge("oracle limited to 6 facts and 12 covered states")
    ones = zeros = 0
    for x in inst.X:
        ones |= x
        zeros |= ~x
    best: dict[int, int] = {}
    for p in literal_product(inst.num_facts):
        if present_only and (p.pos & ~ones or p.neg & ~zeros):
            continue
        if any(p.matches(y) for y in inst.Y):
            continue
        mask = 0
        for j, x in enumerate(inst.X):
            if p.matches(x):
                mask |= 1 << j
        cost = len(p)
        if cost < best.get(mask, cost + 1):
            best[mask] = cost
    return best


def minimality_oracle(inst: CoverInstance) -> int:
    """Exact minimum number of partial states, by exhaustive enumeration."""
    if not inst.X:
        return 0
    covers = _valid_covers(inst)
    full = (1 << len(inst.X)) - 1
    reached = {0}
    k = 0
    while full not in reached:
        k += 1
        reached = {m | c for m in reached for c in covers}
    return k


def min_literals_oracle(inst: CoverInstance, k: int, present_only: bool = False) -> int | None:
    """Fewest total literals over k partial states that cover X and exclude Y.

    Every slot must exclude Y even when it covers nothing.  Below the minimum
    k every slot covers something, so ``present_only`` makes no difference
    there; above it, spare slots differ between the two programs.
    """
    covers = _valid_covers(inst, present_only)
    full = (1 << len(inst.X)) - 1
    dp = {0: 0}
    for _ in range(k):
        nxt: dict[int, int] = {}
        for m, c0 in dp.items():
            for mask, c in covers.items():
                key = m | mask
                if c0 + c < nxt.get(key, c0 + c + 1):
                    nxt[key] = c0 + c
        dp = nxt
    return dp.get(full)
