import itertools
import math
import random
from collections import deque

import pytest

from policysearch.concretizer import concretize
from policysearch.errors import InvalidInput, InvalidWeight
from policysearch.explicit import explicit_task
from policysearch.heuristics import (
    INF, Algorithm, ClassicalHeuristic, StubHeuristic, delta, delta_nearest, f_value,
)
from policysearch.microtasks import all_graphs, random_strips
from policysearch.policy import Policy

WORKED = {"s_A": 2, "s_B": 3, "s_C": 2, "s_D": 1, "s_E": 1}


def worked_example(n1):
    policy = n1.policy([("s_A", "a"), ("s_B", "b"), ("s_C", "c_L"), ("s_D", "d")])
    h = StubHeuristic({getattr(n1, k): v for k, v in WORKED.items()})
    return policy, h


def determinized_distance(task, state):
    """BFS over the all-outcomes determinization."""
    seen = {state}
    queue = deque([(state, 0)])
    while queue:
        s, d = queue.popleft()
        if task.is_goal(s):
            return d
        for a in task.applicable_actions(s):
            for t in task.successor_list(s, a):
                if t not in seen:
                    seen.add(t)
                    queue.append((t, d + 1))
    return INF


def test_delta_worked_example():
    assert delta([2, 3, 2, 1, 1]) == 5
    assert delta([]) == 0
    assert delta([0, 0, 0, 0]) == 3


def test_delta_nearest_worked_example(n1):
    policy, h = worked_example(n1)
    assert delta_nearest(policy, h) == 5
    assert f_value(policy, Algorithm("astar"), h) == 5
    assert f_value(policy, Algorithm("wastar", 2), h) == 6
    assert f_value(policy, Algorithm("gbfs"), h) == 1


def test_solution_is_valued_at_its_size(n1):
    policy, h = worked_example(n1)
    pi2 = policy.extend(n1.s_E, n1.e)
    assert delta_nearest(pi2, h) == 5


def test_empty_policy_value(fig1):
    h = StubHeuristic({fig1.init: 2})
    assert delta_nearest(Policy.empty(fig1), h) == 2


def test_infinity_propagates(n1):
    policy, _ = worked_example(n1)
    assert delta_nearest(policy, StubHeuristic({n1.s_E: INF})) == INF


def test_algorithm_parsing():
    assert Algorithm.parse("wastar:3") == Algorithm("wastar", 3)
    assert str(Algorithm.parse("wastar:1.5")) == "wastar:1.5"
    assert Algorithm.parse("gbfs").kind == "gbfs"
    with pytest.raises(InvalidWeight):
        Algorithm.parse("wastar:1")
    with pytest.raises(InvalidWeight):
        Algorithm.parse("wastar:x")
    with pytest.raises(InvalidInput):
        Algorithm.parse("bfs")


def test_goal_states_evaluate_to_zero(fig1, n1):
    for kind in ("blind", "hmax", "hadd"):
        assert ClassicalHeuristic(fig1, kind)(n1.s_F) == 0
    assert ClassicalHeuristic(fig1, "blind")(n1.s_A) == 1


def test_hmax_is_graph_distance_on_explicit_tasks(fig1):
    h = ClassicalHeuristic(fig1, "hmax")
    for s in fig1.reachable_states():
        assert h(s) == determinized_distance(fig1, s)
    assert h(fig1.named_state("s_E")) == 2
    assert h(fig1.named_state("s_D")) == 1


def test_dead_end_is_infinite(fig2, n2):
    assert math.isinf(ClassicalHeuristic(fig2, "hmax")(n2.s_X))
    assert math.isinf(ClassicalHeuristic(fig2, "hadd")(n2.s_X))


@pytest.mark.parametrize("seed", range(30))
def test_hmax_admissible_and_below_hadd(seed):
    rng = random.Random(seed)
    task = random_strips(rng, num_facts=5, num_actions=6)
    hmax = ClassicalHeuristic(task, "hmax")
    hadd = ClassicalHeuristic(task, "hadd")
    for bits in range(1 << task.num_facts):
        s = task.state(bits)
        d = determinized_distance(task, s)
        assert hmax(s) <= d
        assert hmax(s) <= hadd(s)
        assert math.isinf(hmax(s)) == math.isinf(hadd(s))
        if math.isinf(d):
            continue
        assert not math.isinf(hmax(s))


def policies_of(task):
    states = [s for s in task.reachable_states() if not task.is_goal(s)]
    options = [(None, *task.applicable_actions(s)) for s in states]
    for choice in itertools.product(*options):
        yield Policy.from_mapping(task, {s: a for s, a in zip(states, choice) if a is not None})


def test_extended_awareness_and_admissibility():
    checked = 0
    for task in itertools.islice(all_graphs(3), 0, None, 3):
        h = ClassicalHeuristic(task, "hmax")
        policies = list(policies_of(task))
        solutions = [p for p in policies if p.is_solution()]
        by_hollow = {}
        for p in policies:
            f = delta_nearest(p, h)
            key = (frozenset(p.domain), frozenset(p.front))
            assert by_hollow.setdefault(key, f) == f
            star = concretize(task, p.domain, p.front)
            if star is not None and star.is_solution():
                assert delta_nearest(star, h) <= f
            for sol in solutions:
                if p.mapping.items() <= sol.mapping.items():
                    assert f <= len(sol)
                    checked += 1
        for sol in solutions:
            assert delta_nearest(sol, h) == len(sol)
    assert checked > 100


def test_all_states_goal_task_values():
    task = explicit_task(["g"], "g", ["g"], [])
    assert ClassicalHeuristic(task)(task.init) == 0
