"""Structural symmetries: description graphs, automorphism generators, state signatures.

A structural symmetry permutes facts and actions separately, keeps the goal,
maps each action's precondition and multiset of effects onto those of its
image, and never moves a fact or action out of its partition.  Such
permutations are exactly the color-preserving automorphisms of the problem
description graph built here, which are found by color refinement with
individualization and backtracking.
"""
from __future__ import annotations

import itertools
import time
from collections import Counter
from dataclasses import dataclass

from .core import FondTask, State
from .errors import OrbitBudgetExceeded, OracleTooLarge

DEFAULT_ORBIT_BUDGET = 10_000


@dataclass(frozen=True)
class Permutation:
    """A permutation of fact ids together with one of action ids."""

    facts: tuple[int, ...]
    actions: tuple[int, ...]

    @classmethod
    def identity(cls, task: FondTask) -> Permutation:
        return cls(tuple(range(task.num_facts)), tuple(range(len(task.actions))))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.facts)) and all(
            i == j for i, j in enumerate(self.actions)
        )

    def map_bits(self, bits: int) -> int:
        out = 0
        while bits:
            low = bits & -bits
            out |= 1 << self.facts[low.bit_length() - 1]
            bits ^= low
        return out

    def apply(self, task: FondTask, state: State) -> State:
        return task.state(self.map_bits(state.bits))

    def compose(self, other: Permutation) -> Permutation:
        """``self`` after ``other``."""
        return Permutation(
            tuple(self.facts[f] for f in other.facts),
            tuple(self.actions[a] for a in other.actions),
        )


def _is_perm(seq, n) -> bool:
    return len(seq) == n and sorted(seq) == list(range(n))


def check_symmetry(task: FondTask, perm: Permutation) -> bool:
    n, m = task.num_facts, len(task.actions)
    if not _is_perm(perm.facts, n) or not _is_perm(perm.actions, m):
        return False
    sf = perm.facts
    for f in task.facts:
        if (f.id in task.goal) != (sf[f.id] in task.goal):
            return False
        if task.facts[sf[f.id]].partition_id != f.partition_id:
            return False
    for a in task.actions:
        b = task.actions[perm.actions[a.id]]
        if b.partition_id != a.partition_id:
            return False
        if frozenset(sf[f] for f in a.pre) != b.pre:
            return False
        mapped = Counter(
            (frozenset(sf[f] for f in e.delete), frozenset(sf[f] for f in e.add)) for e in a.effects
        )
        if mapped != Counter((e.delete, e.add) for e in b.effects):
            return False
    return True


class Pdg:
    """Colored digraph with fact, action and effect vertices.

    Facts are colored by (partition, goal membership), actions by partition,
    and all effect vertices share one color so effects of an action may be
    reordered.  Edge labels distinguish precondition, action-to-effect, add
    and delete arcs.
    """

    PRE, EFF, ADD, DEL = range(4)

    def __init__(self, task: FondTask):
        self.task = task
        n, m = task.num_facts, len(task.actions)
        self.num_facts, self.num_actions = n, m
        colors = [("f", f.partition_id, f.id in task.goal) for f in task.facts]
        colors += [("a", a.partition_id, False) for a in task.actions]
        edges: list[tuple[int, int, int]] = []
        for a in task.actions:
            av = n + a.id
            for f in a.pre:
                edges.append((f, av, self.PRE))
            for e in a.effects:
                ev = len(colors)
                colors.append(("e", 0, False))
                edges.append((av, ev, self.EFF))
                edges.extend((ev, f, self.ADD) for f in e.add)
                edges.extend((ev, f, self.DEL) for f in e.delete)
        ranks = {c: i for i, c in enumerate(sorted(set(colors)))}
        self.colors = [ranks[c] for c in colors]
        self.size = len(colors)
        self.adj: list[list[tuple[int, int]]] = [[] for _ in range(self.size)]
        self.edge_set = set()
        for u, v, lab in edges:
            self.adj[u].append((2 * lab, v))
            self.adj[v].append((2 * lab + 1, u))
            self.edge_set.add((u, v, lab))
        self.edges = edges

    def is_automorphism(self, perm: list[int]) -> bool:
        if any(self.colors[perm[v]] != self.colors[v] for v in range(self.size)):
            return False
        return all((perm[u], perm[v], lab) in self.edge_set for u, v, lab in self.edges)


class _Timeout(Exception):
    pass


class _AutomorphismSearch:
    def __init__(self, pdg: Pdg, deadline: float | None):
        self.pdg = pdg
        self.deadline = deadline

    def tick(self):
        if self.deadline is not None and time.perf_counter() > self.deadline:
            raise _Timeout

    def refine(self, colors: list[int]) -> list[int]:
        adj = self.pdg.adj
        count = len(set(colors))
        while True:
            self.tick()
            sigs = [
                (colors[v], tuple(sorted((lab, colors[u]) for lab, u in adj[v])))
                for v in range(len(colors))
            ]
            ranks = {s: i for i, s in enumerate(sorted(set(sigs)))}
            colors = [ranks[s] for s in sigs]
            if len(ranks) == count:
                return colors
            count = len(ranks)

    def individualize(self, colors: list[int], v: int) -> list[int]:
        out = [2 * c for c in colors]
        out[v] += 1
        return self.refine(out)

    @staticmethod
    def target_cell(colors: list[int]) -> int | None:
        """Color of the first non-singleton cell, or None when discrete."""
        sizes = Counter(colors)
        multi = [c for c, k in sizes.items() if k > 1]
        return min(multi) if multi else None

    def generators(self) -> list[list[int]]:
        root = self.refine(list(self.pdg.colors))
        path_nodes = [root]
        path = []
        while (cell := self.target_cell(path_nodes[-1])) is not None:
            v = min(i for i, c in enumerate(path_nodes[-1]) if c == cell)
            path.append(v)
            path_nodes.append(self.individualize(path_nodes[-1], v))
        leaf = path_nodes[-1]
        profiles = [sorted(c) for c in path_nodes]

        found: list[list[int]] = []
        parent = list(range(self.pdg.size))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for level in range(len(path) - 1, -1, -1):
            node = path_nodes[level]
            v = path[level]
            cell = [u for u, c in enumerate(node) if c == node[v] and u != v]
            for u in cell:
                if find(u) == find(v):
                    continue
                gamma = self.match(self.individualize(node, u), level + 1, path_nodes, profiles, leaf)
                if gamma is not None:
                    found.append(gamma)
                    for x, y in enumerate(gamma):
                        rx, ry = find(x), find(y)
                        if rx != ry:
                            parent[rx] = ry
        return found

    def match(self, colors, depth, path_nodes, profiles, leaf) -> list[int] | None:
        """Search the subtree under ``colors`` for a leaf equivalent to the first leaf."""
        self.tick()
        if sorted(colors) != profiles[depth]:
            return None
        if depth == len(path_nodes) - 1:
            by_color = {c: u for u, c in enumerate(colors)}
            perm = [by_color[leaf[v]] for v in range(len(leaf))]
            return perm if self.pdg.is_automorphism(perm) else None
        cell = self.target_cell(path_nodes[depth])
        for w in [u for u, c in enumerate(colors) if c == cell]:
            hit = self.match(self.individualize(colors, w), depth + 1, path_nodes, profiles, leaf)
            if hit is not None:
                return hit
        return None


class PermutationGroup:
    """Generators of a symmetry group acting on the task's states."""

    def __init__(self, task: FondTask, generators=(), timed_out: bool = False):
        self.task = task
        self.generators: tuple[Permutation, ...] = tuple(generators)
        self.timed_out = timed_out

    def __len__(self):
        return len(self.generators)

    def neighbours(self, state: State) -> list[State]:
        return [g.apply(self.task, state) for g in self.generators]

    def orbit(self, state: State, budget: int | None = None) -> list[State]:
        seen = {state}
        order = [state]
        i = 0
        while i < len(order):
            for t in self.neighbours(order[i]):
                if t not in seen:
                    seen.add(t)
                    order.append(t)
                    if budget is not None and len(order) > budget:
                        raise OrbitBudgetExceeded(f"orbit larger than {budget}")
            i += 1
        return order

    def fact_permutations(self) -> set[tuple[int, ...]]:
        """Closure of the generators' fact parts (small groups only)."""
        ident = tuple(range(self.task.num_facts))
        seen = {ident}
        frontier = [ident]
        while frontier:
            p = frontier.pop()
            for g in self.generators:
                q = tuple(g.facts[x] for x in p)
                if q not in seen:
                    seen.add(q)
                    frontier.append(q)
        return seen


def find_generators(task: FondTask, time_budget: float | None = 5.0) -> PermutationGroup:
    """Automorphism generators of the task's PDG, as fact/action permutations.

    Running out of ``time_budget`` seconds yields an empty group.
    """
    pdg = Pdg(task)
    deadline = time.perf_counter() + time_budget if time_budget is not None else None
    try:
        raw = _AutomorphismSearch(pdg, deadline).generators()
    except _Timeout:
        return PermutationGroup(task, (), timed_out=True)
    n, m = pdg.num_facts, pdg.num_actions
    gens = []
    for gamma in raw:
        perm = Permutation(tuple(gamma[:n]), tuple(gamma[i] - n for i in range(n, n + m)))
        if perm.is_identity() or perm in gens:
            continue
        if not check_symmetry(task, perm):
            raise AssertionError("automorphism search produced a non-symmetry")
        gens.append(perm)
    return PermutationGroup(task, gens)


def greedy_signature(state: State, group: PermutationGroup) -> State:
    while True:
        best = min(group.neighbours(state), default=state)
        if best < state:
            state = best
        else:
            return state


def canonical_signature(
    state: State, group: PermutationGroup, budget: int | None = DEFAULT_ORBIT_BUDGET, memo=None
) -> State:
    """The ≺-smallest state of the orbit, by exhaustive orbit traversal."""
    if memo is not None and state in memo:
        return memo[state]
    orbit = group.orbit(state, budget)
    best = min(orbit)
    if memo is not None:
        for s in orbit:
            memo[s] = best
    return best


class SymmetryContext:
    """State signature used by symmetric frontier pruning."""

    def __init__(self, group: PermutationGroup, mode: str = "canonical", orbit_budget: int = DEFAULT_ORBIT_BUDGET):
        if mode not in ("none", "greedy", "canonical"):
            raise ValueError(f"unknown symmetry mode {mode!r}")
        self.group = group
        self.mode = mode
        self.orbit_budget = orbit_budget
        self._memo: dict[State, State] = {}
        self.fallbacks = 0

    @classmethod
    def build(cls, task: FondTask, mode: str = "canonical", time_budget: float | None = 5.0,
              orbit_budget: int = DEFAULT_ORBIT_BUDGET) -> SymmetryContext:
        group = find_generators(task, time_budget) if mode != "none" else PermutationGroup(task)
        return cls(group, mode, orbit_budget)

    def signature(self, state: State) -> State:
        if self.mode == "none" or not self.group.generators:
            return state
        if self.mode == "greedy":
            return greedy_signature(state, self.group)
        try:
            return canonical_signature(state, self.group, self.orbit_budget, self._memo)
        except OrbitBudgetExceeded:
            self.fallbacks += 1
            return greedy_signature(state, self.group)


def brute_force_symmetries(task: FondTask, max_facts: int = 8) -> set[tuple[int, ...]]:
    """Fact parts of every structural symmetry, by trying all fact permutations."""
    n = task.num_facts
    if n > max_facts:
        raise OracleTooLarge(f"{n} facts")
    buckets: dict = {}
    for a in task.actions:
        key = (a.partition_id, a.pre, frozenset(Counter((e.delete, e.add) for e in a.effects).items()))
        buckets.setdefault(key, []).append(a.id)
    out = set()
    for sf in itertools.permutations(range(n)):
        actions = [0] * len(task.actions)
        ok = True
        used = Counter()
        for a in task.actions:
            key = (
                a.partition_id,
                frozenset(sf[f] for f in a.pre),
                frozenset(
                    Counter(
                        (frozenset(sf[f] for f in e.delete), frozenset(sf[f] for f in e.add))
                        for e in a.effects
                    ).items()
                ),
            )
            targets = buckets.get(key)
            if not targets or used[key] >= len(targets):
                ok = False
                break
            actions[a.id] = targets[used[key]]
            used[key] += 1
        if ok and check_symmetry(task, Permutation(sf, tuple(actions))):
            out.add(sf)
    return out
