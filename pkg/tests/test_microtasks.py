import random

from policysearch.microtasks import (
    all_graphs, micro_task_stream, mirrored_strips, random_graph, random_policy, random_strips,
    sample_graphs,
)
from policysearch.symmetry import check_symmetry, find_generators


def test_exhaustive_family_sizes():
    assert sum(1 for _ in all_graphs(2)) == 7
    assert sum(1 for _ in all_graphs(3)) == 484


def test_exhaustive_family_is_duplicate_free():
    prints = [t.fingerprint() for t in all_graphs(3)]
    assert len(set(prints)) == len(prints)


def test_random_graph_shape():
    rng = random.Random(0)
    for _ in range(50):
        task = random_graph(rng, max_states=5)
        assert task.init == task.named_state("s0")
        last = task.facts[-1].name
        assert task.is_goal(task.named_state(last))


def test_stream_names_are_unique():
    names = [t.name for t in micro_task_stream(0, 200)]
    assert len(set(names)) == 200


def test_mirrored_tasks_have_the_swap():
    rng = random.Random(4)
    for _ in range(20):
        task = mirrored_strips(rng)
        group = find_generators(task)
        assert len(group) >= 1 and all(check_symmetry(task, g) for g in group.generators)


def test_random_policy_is_built_from_open_states():
    rng = random.Random(1)
    task = random_strips(rng, 5, 6)
    for _ in range(30):
        p = random_policy(task, rng)
        assert all(task.applicable(s, a) for s, a in p.items())


def test_sample_graphs_stay_in_family():
    family = {t.fingerprint() for t in all_graphs(3)}
    sample = list(sample_graphs(3, 50, seed=4))
    assert all(t.fingerprint() in family for t in sample)
    assert [t.fingerprint() for t in sample] == [t.fingerprint() for t in sample_graphs(3, 50, seed=4)]
