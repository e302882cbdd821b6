import itertools

import pytest

from policysearch.errors import OracleTooLarge
from policysearch.explicit import explicit_task
from policysearch.microtasks import ARCHETYPES, all_graphs, archetype
from policysearch.policy import Policy
from policysearch.validator import (
    brute_force_optimum, enumerate_micro_tasks, verify_strong_cyclic,
)


def test_fig1_verdicts(fig1, n1):
    pi2 = {n1.s_A: n1.a, n1.s_B: n1.b, n1.s_C: n1.c_L, n1.s_D: n1.d, n1.s_E: n1.e}
    assert verify_strong_cyclic(fig1, pi2).ok
    pi1 = {n1.s_D: n1.d, n1.s_E: n1.e}
    assert verify_strong_cyclic(fig1, pi1).violations == [("init-coverage", n1.s_A)]
    pi3 = dict(pi2)
    pi3[n1.s_C] = n1.c_R
    verdict = verify_strong_cyclic(fig1, pi3)
    assert ("properness", n1.s_B) in verdict.violations
    assert "properness: s_B" in verdict.report(fig1)


def test_goal_and_applicability_rules(fig1, n1):
    verdict = verify_strong_cyclic(fig1, {n1.s_F: n1.a, n1.s_A: n1.b})
    assert {"goal-mapped", "applicability"} <= verdict.rules()


def test_open_state_is_reported(fig1, n1):
    verdict = verify_strong_cyclic(fig1, {n1.s_A: n1.a})
    assert ("goal-closed", n1.s_B) in verdict.violations


def test_optimum_oracle(fig1, fig3):
    assert brute_force_optimum(fig1) == 5
    assert brute_force_optimum(fig3) == 4
    assert brute_force_optimum(explicit_task(["g"], "g", ["g"], [])) == 0
    assert brute_force_optimum(explicit_task(["i", "x", "g"], "i", ["g"], [("go", "i", ["x"])])) is None


def test_optimum_cap():
    states = [f"s{i}" for i in range(12)]
    chain = [("go", s, [t]) for s, t in zip(states, states[1:])]
    with pytest.raises(OracleTooLarge):
        brute_force_optimum(explicit_task(states, "s0", ["s11"], chain), cap=5)


def test_agrees_with_policy_checks():
    for task in itertools.islice(all_graphs(3), 0, None, 2):
        states = [s for s in task.reachable_states() if not task.is_goal(s)]
        options = [(None, *task.applicable_actions(s)) for s in states]
        for choice in itertools.product(*options):
            mapping = {s: a for s, a in zip(states, choice) if a is not None}
            assert verify_strong_cyclic(task, mapping).ok == Policy.from_mapping(task, mapping).is_solution()


def test_stream_is_deterministic():
    first = [t.fingerprint() for t in enumerate_micro_tasks(0, 20)]
    assert first == [t.fingerprint() for t in enumerate_micro_tasks(0, 20)]
    assert first != [t.fingerprint() for t in enumerate_micro_tasks(1, 20)]


def test_stream_respects_caps():
    for task in enumerate_micro_tasks(3, 50, max_states=4, max_actions=1):
        if task.name.startswith("micro"):
            assert len(task.facts) <= 4
            for s in task.reachable_states():
                assert len(task.applicable_actions(s)) <= 1


def test_deadlock_pair_archetype():
    task = archetype("deadlock-pair")
    p, q = task.named_state("p"), task.named_state("q")
    bad = Policy.from_mapping(task, {task.init: task.action_id("left"), p: task.action_id("loop"),
                                     q: task.action_id("back")})
    assert not bad.is_proper()
    assert brute_force_optimum(task) == 2


def test_dead_end_archetype():
    task = archetype("dead-end")
    risky = Policy.from_mapping(task, {task.init: task.action_id("risky")})
    assert task.named_state("x") in risky.remain
    assert not task.applicable_actions(task.named_state("x"))


def test_every_archetype_builds():
    for kind in ARCHETYPES:
        assert archetype(kind).name == kind
    with pytest.raises(ValueError):
        archetype("nope")
