import random

import pytest

from policysearch.compressor import (
    CoverInstance, build_full, build_simplified, compress, min_literals_oracle, minimality_oracle,
    minimum_cover, solve_cover,
)
from policysearch.errors import InvalidInput, OracleTooLarge, SolverBudgetExceeded
from policysearch.microtasks import random_policy, random_strips
from policysearch.partial import validate_partial_solution
from policysearch.search import SearchConfig, and_star

CRAFTED = CoverInstance((0b000, 0b001, 0b010), (0b011, 0b100), 3)


def random_instance(rng, n=None):
    n = n or rng.randint(1, 4)
    states = rng.sample(range(1 << n), rng.randint(1, min(8, 1 << n)))
    cut = rng.randint(1, len(states))
    return CoverInstance(tuple(states[:cut]), tuple(states[cut:]), n)


def covers(inst, parts):
    return all(any(p.matches(x) for p in parts) for x in inst.X) and not any(
        p.matches(y) for p in parts for y in inst.Y
    )


def test_empty_exclusion_needs_no_literals():
    inst = CoverInstance((0b01, 0b10, 0b11), (), 2)
    parts, obj = solve_cover(inst, 1)
    assert obj == 0 and len(parts[0]) == 0


def test_single_fact_forced():
    parts, obj = solve_cover(CoverInstance((1,), (0,), 1), 1)
    assert obj == 1 and parts[0].literals() == [(0, True)]


def test_crafted_instance():
    assert solve_cover(CRAFTED, 1) is None
    parts, obj = solve_cover(CRAFTED, 2)
    assert covers(CRAFTED, parts) and obj == 4
    assert minimality_oracle(CRAFTED) == 2
    assert min_literals_oracle(CRAFTED, 2) == 4


def test_instance_checks():
    with pytest.raises(InvalidInput):
        CoverInstance((1,), (1,), 1)
    with pytest.raises(InvalidInput):
        solve_cover(CRAFTED, 0)
    assert minimality_oracle(CoverInstance((), (1,), 1)) == 0
    with pytest.raises(OracleTooLarge):
        minimality_oracle(CoverInstance((1,), (), 7))


def test_simplified_model_shape():
    model, slots = build_simplified(CRAFTED, 2)
    # bit 2 is false in every X state, so f2=1 gets no variable
    assert all((2, 1) not in lits and (2, 0) in lits for lits in slots)
    full, full_slots = build_full(CRAFTED, 2)
    assert full.num_vars > model.num_vars


@pytest.mark.parametrize("seed", range(120))
def test_against_oracles(seed):
    rng = random.Random(seed)
    inst = random_instance(rng)
    kmin = minimality_oracle(inst)
    assert len(minimum_cover(inst)) == kmin
    for k in range(1, kmin + 2):
        found = solve_cover(inst, k)
        best = min_literals_oracle(inst, k, present_only=True)
        assert (found is None) == (best is None)
        if k <= kmin:
            assert best == min_literals_oracle(inst, k)
        if found is not None:
            parts, obj = found
            assert covers(inst, parts) and obj == best
            present = {(f, x >> f & 1) for x in inst.X for f in range(inst.num_facts)}
            assert all((f, int(v)) in present for p in parts for f, v in p.literals())
            assert solve_cover(inst, k + 1) is not None


@pytest.mark.parametrize("seed", range(60))
def test_full_and_simplified_agree(seed):
    inst = random_instance(random.Random(seed))
    # spare slots above the minimum k may use literals the reduced program lacks
    for k in range(1, minimality_oracle(inst) + 1):
        a = solve_cover(inst, k)
        b = solve_cover(inst, k, full=True)
        assert (a is None) == (b is None)
        if a is not None:
            assert a[1] == b[1]


def test_fig1_solution_compresses_to_single_literals(fig1):
    pi2 = and_star(fig1, SearchConfig(pruning="identity")).policy
    tau = compress(fig1, pi2)
    assert len(tau) == 5 and all(len(p) == 1 for p in tau)


def test_same_action_everywhere_gives_empty_rule():
    from policysearch.core import Action, Effect, Fact, FondTask
    from policysearch.policy import Policy

    facts = [Fact(0, "p"), Fact(1, "unreachable")]
    toggle = Action(0, "toggle", frozenset(), (Effect(frozenset(), frozenset([0])), Effect(frozenset([0]), frozenset())))
    task = FondTask(facts, [toggle], [], [1])
    p = Policy.from_mapping(task, {task.state(0): 0, task.state(1): 0})
    assert not p.front
    tau = compress(task, p)
    assert len(tau) == 1 and len(next(iter(tau))) == 0


@pytest.mark.parametrize("seed", range(40))
def test_random_policies(seed):
    rng = random.Random(seed)
    task = random_strips(rng, num_facts=rng.randint(2, 6), num_actions=5)
    p = random_policy(task, rng, max_size=8)
    tau = compress(task, p)
    for a in set(p.mapping.values()):
        X = [s for s, b in p.items() if b == a]
        Y = [s for s, b in p.items() if b != a] + list(p.front)
        inst = CoverInstance.of_states(X, Y, task.num_facts)
        assert sum(1 for r, b in tau.items() if b == a) == minimality_oracle(inst)
    for s in p.reach:
        acts = tau.actions_at(s)
        assert acts == ({p[s]} if s in p else set())
    order = sorted(set(p.mapping.values()))
    rng.shuffle(order)
    assert len(compress(task, p, action_order=order)) == len(tau)
    if p.is_solution():
        assert validate_partial_solution(task, tau)


def test_budget_propagates():
    rng = random.Random(2)
    inst = CoverInstance(tuple(range(0, 32, 3)), tuple(range(1, 32, 3)), 5)
    with pytest.raises(SolverBudgetExceeded):
        minimum_cover(inst, node_budget=1)
