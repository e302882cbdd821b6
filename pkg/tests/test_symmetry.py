import random

import pytest

from policysearch.core import Action, Effect, Fact, FondTask
from policysearch.errors import OrbitBudgetExceeded, OracleTooLarge
from policysearch.microtasks import archetype, micro_task_stream, mirrored_strips, random_strips
from policysearch.symmetry import (
    Pdg, Permutation, PermutationGroup, SymmetryContext, brute_force_symmetries,
    canonical_signature, check_symmetry, find_generators, greedy_signature,
)

from test_pddl import packages


def swap(task, facts, actions):
    f = list(range(task.num_facts))
    a = list(range(len(task.actions)))
    for x, y in facts:
        f[x], f[y] = f[y], f[x]
    for x, y in actions:
        a[x], a[y] = a[y], a[x]
    return Permutation(tuple(f), tuple(a))


def test_identity_is_a_symmetry(fig1):
    assert check_symmetry(fig1, Permutation.identity(fig1))


def test_package_swap():
    task = packages()
    fi, ai = task.fact_index, task.action_index
    perm = swap(
        task,
        [(fi["at(pkg1,depot)"], fi["at(pkg2,depot)"]), (fi["at(pkg1,shop)"], fi["at(pkg2,shop)"]),
         (fi["delivered(pkg1)"], fi["delivered(pkg2)"])],
        [(ai["carry(pkg1,depot,shop)"], ai["carry(pkg2,depot,shop)"]),
         (ai["hand-over(pkg1)"], ai["hand-over(pkg2)"])],
    )
    assert check_symmetry(task, perm)
    assert Pdg(task).is_automorphism(
        list(perm.facts) + [len(perm.facts) + a for a in perm.actions]
        + list(range(len(perm.facts) + len(perm.actions), Pdg(task).size))
    ) is False  # effect vertices must move with their actions
    partial = swap(task, [(fi["delivered(pkg1)"], fi["at(pkg1,depot)"])], [])
    assert not check_symmetry(task, partial)


def test_non_bijection_rejected(fig1):
    assert not check_symmetry(fig1, Permutation((0, 0, 2, 3, 4, 5), tuple(range(6))))


def test_goal_swap_rejected(fig1, n1):
    perm = swap(fig1, [(fig1.fact_index["s_F"], fig1.fact_index["s_E"])], [])
    assert not check_symmetry(fig1, perm)


def test_fig1_has_no_symmetry(fig1):
    assert len(find_generators(fig1)) == 0
    assert brute_force_symmetries(fig1) == {tuple(range(6))}


def test_one_fact_task():
    task = FondTask([Fact(0, "p")], [Action(0, "a", frozenset(), (Effect(frozenset(), frozenset([0])),))], [], [0])
    assert len(find_generators(task)) == 0


def test_package_generators_and_orbits():
    task = packages()
    group = find_generators(task)
    assert len(group) >= 1
    assert all(check_symmetry(task, g) for g in group.generators)
    fi = task.fact_index
    one_moved = task.state_from_facts([fi["at(pkg1,shop)"], fi["at(pkg2,depot)"]])
    mirror = task.state_from_facts([fi["at(pkg2,shop)"], fi["at(pkg1,depot)"]])
    assert set(group.orbit(one_moved)) == {one_moved, mirror}
    assert group.orbit(task.init) == [task.init]


def test_timeout_gives_trivial_group():
    task = packages()
    group = find_generators(task, time_budget=0.0)
    assert len(group) == 0 and group.timed_out


@pytest.mark.parametrize("seed", range(25))
def test_generators_span_the_full_group(seed):
    rng = random.Random(seed)
    task = mirrored_strips(rng, half_facts=3, half_actions=3) if seed % 2 else random_strips(rng, 6, 6)
    group = find_generators(task)
    assert all(check_symmetry(task, g) for g in group.generators)
    assert group.fact_permutations() == brute_force_symmetries(task)


def test_brute_force_cap():
    task = random_strips(random.Random(0), 9, 3)
    with pytest.raises(OracleTooLarge):
        brute_force_symmetries(task)


@pytest.mark.parametrize("seed", range(20))
def test_transition_system_is_equivariant(seed):
    rng = random.Random(seed)
    task = mirrored_strips(rng, half_facts=3, half_actions=4)
    for g in find_generators(task).generators:
        for bits in range(1 << task.num_facts):
            s = task.state(bits)
            gs = g.apply(task, s)
            assert task.is_goal(s) == task.is_goal(gs)
            for a in range(len(task.actions)):
                b = g.actions[a]
                assert task.applicable(s, a) == task.applicable(gs, b)
                if task.applicable(s, a):
                    assert {g.apply(task, t) for t in task.successors(s, a)} == task.successors(gs, b)


@pytest.mark.parametrize("seed", range(20))
def test_signature_properties(seed):
    rng = random.Random(seed)
    task = mirrored_strips(rng, half_facts=3, half_actions=3)
    group = find_generators(task)
    canon = {}
    greedy = {}
    for bits in range(1 << task.num_facts):
        s = task.state(bits)
        orbit = group.orbit(s)
        c = canonical_signature(s, group)
        gr = greedy_signature(s, group)
        assert c == min(orbit)
        assert gr in orbit and c <= gr
        assert canonical_signature(c, group) == c
        for g in group.generators:
            assert canonical_signature(g.apply(task, s), group) == c
        canon[s], greedy[s] = c, gr
    for s in canon:
        for t in canon:
            if greedy[s] == greedy[t]:
                assert canon[s] == canon[t]


def test_empty_group_signatures(fig1, n1):
    group = PermutationGroup(fig1)
    assert greedy_signature(n1.s_C, group) == n1.s_C
    assert canonical_signature(n1.s_C, group) == n1.s_C


def test_greedy_moves_to_mirror_minimum():
    task = packages()
    group = find_generators(task)
    fi = task.fact_index
    a = task.state_from_facts([fi["at(pkg1,shop)"], fi["at(pkg2,depot)"]])
    b = task.state_from_facts([fi["at(pkg2,shop)"], fi["at(pkg1,depot)"]])
    small, large = sorted([a, b])
    assert greedy_signature(large, group) == small
    assert greedy_signature(small, group) == small


def test_orbit_budget_falls_back_to_greedy():
    task = mirrored_strips(random.Random(3), half_facts=3, half_actions=3)
    group = find_generators(task)
    s = next(task.state(b) for b in range(1 << task.num_facts) if len(group.orbit(task.state(b))) > 1)
    with pytest.raises(OrbitBudgetExceeded):
        canonical_signature(s, group, budget=1)
    ctx = SymmetryContext(group, "canonical", orbit_budget=1)
    assert ctx.signature(s) == greedy_signature(s, group)
    assert ctx.fallbacks == 1


def test_context_modes(fig3, n3):
    none = SymmetryContext.build(fig3, "none")
    assert none.signature(n3.s_C) == n3.s_C
    greedy = SymmetryContext.build(fig3, "greedy")
    assert greedy.signature(n3.s_C) == greedy.signature(n3.s_B)
    with pytest.raises(ValueError):
        SymmetryContext(PermutationGroup(fig3), "exact")


def test_mirror_archetype_has_symmetry():
    task = archetype("mirror", random.Random(0))
    group = find_generators(task)
    assert len(group) >= 1 and all(check_symmetry(task, g) for g in group.generators)


def test_random_micro_graphs_generators_are_symmetries():
    for task in micro_task_stream(21, 100, max_states=6, max_actions=3):
        group = find_generators(task)
        assert all(check_symmetry(task, g) for g in group.generators)
