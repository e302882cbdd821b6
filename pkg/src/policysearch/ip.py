"""A small exact 0-1 integer programming solver (depth-first branch and bound).

Rows are linear ``Σ a_j x_j ≥ b`` with integer coefficients; ``≤`` and ``=``
rows are rewritten into that form.  Costs must be non-negative, so the
all-zero completion of a partial assignment is its cheapest completion; the
solver branches on a variable of some row that this completion violates,
trying value 1 first.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Iterable

from .errors import InvalidInput, SolverBudgetExceeded


@dataclass
class Model:
    costs: list[int] = field(default_factory=list)
    names: list[str] = field(default_factory=list)
    rows: list[tuple[tuple[tuple[int, int], ...], int]] = field(default_factory=list)

    @property
    def num_vars(self) -> int:
        return len(self.costs)

    def add_var(self, cost: int = 0, name: str = "") -> int:
        if cost < 0:
            raise InvalidInput("costs must be non-negative")
        self.costs.append(cost)
        self.names.append(name)
        return len(self.costs) - 1

    def add_ge(self, terms: Iterable[tuple[int, int]], rhs: int):
        merged: dict[int, int] = {}
        for var, coef in terms:
            merged[var] = merged.get(var, 0) + coef
        self.rows.append((tuple((v, c) for v, c in merged.items() if c), rhs))

    def add_le(self, terms: Iterable[tuple[int, int]], rhs: int):
        self.add_ge(((v, -c) for v, c in terms), -rhs)

    def add_eq(self, terms: Iterable[tuple[int, int]], rhs: int):
        terms = list(terms)
        self.add_ge(terms, rhs)
        self.add_le(terms, rhs)


@dataclass
class Solution:
    feasible: bool
    objective: int | None = None
    values: list[int] | None = None
    nodes: int = 0


class _Solver:
    def __init__(self, model: Model, node_budget: int | None):
        self.model = model
        self.node_budget = node_budget
        n = model.num_vars
        self.value: list[int | None] = [None] * n
        self.rows_of: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        self.hi = []  # best achievable left-hand side
        self.zero = []  # left-hand side when every free variable is 0
        for r, (terms, _) in enumerate(model.rows):
            self.hi.append(sum(c for _, c in terms if c > 0))
            self.zero.append(0)
            for v, c in terms:
                self.rows_of[v].append((r, c))
        self.trail: list[int] = []
        self.cost = 0
        self.best: int | None = None
        self.best_values: list[int] | None = None
        self.nodes = 0

    def assign(self, var: int, val: int) -> bool:
        """Set ``var`` and propagate; False on conflict (the trail still records changes)."""
        queue = [(var, val)]
        while queue:
            v, x = queue.pop()
            cur = self.value[v]
            if cur is not None:
                if cur != x:
                    return False
                continue
            self.value[v] = x
            self.trail.append(v)
            self.cost += self.model.costs[v] * x
            for r, c in self.rows_of[v]:
                if c > 0 and x == 0:
                    self.hi[r] -= c
                elif c < 0 and x == 1:
                    self.hi[r] += c
                self.zero[r] += c * x
            for r, _ in self.rows_of[v]:
                terms, rhs = self.model.rows[r]
                slack = self.hi[r] - rhs
                if slack < 0:
                    return False
                for u, c in terms:
                    if self.value[u] is None and abs(c) > slack:
                        queue.append((u, 1 if c > 0 else 0))
        return True

    def undo(self, mark: int):
        while len(self.trail) > mark:
            v = self.trail.pop()
            x = self.value[v]
            self.value[v] = None
            self.cost -= self.model.costs[v] * x
            for r, c in self.rows_of[v]:
                if c > 0 and x == 0:
                    self.hi[r] += c
                elif c < 0 and x == 1:
                    self.hi[r] -= c
                self.zero[r] -= c * x

    def pick(self):
        """A branching variable, or None if the zero completion is feasible.

        Also returns a lower bound on the extra cost any completion needs.
        """
        costs = self.model.costs
        choice, extra = None, 0
        for r, (terms, rhs) in enumerate(self.model.rows):
            if self.zero[r] >= rhs:
                continue
            cheapest, var = None, None
            for u, c in terms:
                if c > 0 and self.value[u] is None and (cheapest is None or costs[u] < cheapest):
                    cheapest, var = costs[u], u
            if var is None:
                return -1, 0
            if choice is None:
                choice = var
            extra = max(extra, cheapest)
        return choice, extra

    def search(self):
        self.nodes += 1
        if self.node_budget is not None and self.nodes > self.node_budget:
            raise SolverBudgetExceeded(f"more than {self.node_budget} nodes")
        var, extra = self.pick()
        if var == -1:
            return
        if self.best is not None and self.cost + extra >= self.best:
            return
        if var is None:
            self.best = self.cost
            self.best_values = [x or 0 for x in self.value]
            return
        for val in (1, 0):
            mark = len(self.trail)
            if self.assign(var, val):
                self.search()
            self.undo(mark)

    def run(self) -> Solution:
        for r, (terms, rhs) in enumerate(self.model.rows):
            if self.hi[r] < rhs:
                return Solution(False, nodes=0)
        # rows with nothing free can still force variables at the root
        ok = True
        for r, (terms, rhs) in enumerate(self.model.rows):
            slack = self.hi[r] - rhs
            for u, c in terms:
                if self.value[u] is None and abs(c) > slack:
                    if not self.assign(u, 1 if c > 0 else 0):
                        ok = False
                        break
            if not ok:
                break
        if ok:
            self.search()
        if self.best is None:
            return Solution(False, nodes=self.nodes)
        return Solution(True, self.best, self.best_values, self.nodes)


def solve(model: Model, node_budget: int | None = None) -> Solution:
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 2 * model.num_vars + 1000))
    try:
        return _Solver(model, node_budget).run()
    finally:
        sys.setrecursionlimit(limit)
