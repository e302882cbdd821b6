"""Generators of small tasks and policies used by tests, benchmarks and the CLI."""
from __future__ import annotations

import itertools
import random
from typing import Iterator

from .core import Action, Effect, Fact, FondTask
from .explicit import explicit_task

ARCHETYPES = ("deadlock-pair", "mirror", "dead-end")


def random_graph(rng: random.Random, max_states: int = 5, max_actions: int = 2,
                 max_outcomes: int = 2, name: str = "") -> FondTask:
    """Random explicit graph; ``s0`` is the initial state and the last state is the goal."""
    n = rng.randint(2, max_states)
    states = [f"s{i}" for i in range(n)]
    actions = []
    for i in range(n - 1):
        for j in range(rng.randint(0, max_actions)):
            k = rng.randint(1, max_outcomes)
            outcomes = rng.sample(states, min(k, n))
            actions.append((f"a{j}", states[i], outcomes))
    return explicit_task(states, states[0], [states[-1]], actions, name=name)


def archetype(kind: str, rng: random.Random | None = None, name: str | None = None) -> FondTask:
    rng = rng or random.Random(0)
    name = name or kind
    if kind == "deadlock-pair":
        # the left branch leads into a two-state cycle without exit
        states = ["i", "p", "q", "r", "g"]
        actions = [
            ("left", "i", ["p"]),
            ("right", "i", ["r"]),
            ("loop", "p", ["q"]),
            ("back", "q", ["p"]),
            ("go", "r", ["g", "r"]),
        ]
        return explicit_task(states, "i", ["g"], actions, name=name)
    if kind == "mirror":
        # two interchangeable routes from the initial state to the goal
        extra = rng.randint(0, 1)
        states = ["i", "l", "r", "g"] + (["l2", "r2"] if extra else [])
        actions = [("split", "i", ["l", "r"])]
        if extra:
            actions += [("step", "l", ["l2"]), ("step", "r", ["r2"]),
                        ("fin", "l2", ["g", "l"]), ("fin", "r2", ["g", "r"])]
        else:
            actions += [("fin", "l", ["g", "i"]), ("fin", "r", ["g", "i"])]
        return explicit_task(states, "i", ["g"], actions, name=name)
    if kind == "dead-end":
        states = ["i", "m", "x", "g"]
        actions = [
            ("safe", "i", ["m"]),
            ("risky", "i", ["m", "x"]),
            ("fin", "m", ["g"]),
        ]
        return explicit_task(states, "i", ["g"], actions, name=name)
    raise ValueError(f"unknown archetype {kind!r}")


def micro_task_stream(seed: int = 0, count: int | None = None, max_states: int = 5,
                      max_actions: int = 2, max_outcomes: int = 2) -> Iterator[FondTask]:
    """Deterministic stream of random graphs with every fifth task an archetype."""
    rng = random.Random(seed)
    produced = itertools.count() if count is None else range(count)
    for i in produced:
        if i % 5 == 4:
            kind = ARCHETYPES[(i // 5) % len(ARCHETYPES)]
            yield archetype(kind, rng, name=f"{kind}-{seed}-{i}")
        else:
            yield random_graph(rng, max_states, max_actions, max_outcomes, name=f"micro-{seed}-{i}")


def _state_choices(states: list[str], max_actions: int, max_outcomes: int) -> list[list[list[str]]]:
    outcome_sets = [
        list(c) for k in range(1, max_outcomes + 1) for c in itertools.combinations(states, k)
    ]
    return [
        list(c) for k in range(0, max_actions + 1) for c in itertools.combinations(outcome_sets, k)
    ]


def _graph_from_choices(states: list[str], combo, name: str = "") -> FondTask:
    actions = []
    for i, acts in enumerate(combo):
        for j, outs in enumerate(acts):
            actions.append((f"a{j}", states[i], outs))
    return explicit_task(states, states[0], [states[-1]], actions, name=name)


def all_graphs(num_states: int, max_actions: int = 2, max_outcomes: int = 2) -> Iterator[FondTask]:
    """Every explicit graph on ``num_states`` states with the last one as goal.

    Each non-goal state gets an unordered set of at most ``max_actions``
    distinct actions, each with a set of at most ``max_outcomes`` outcomes.
    """
    states = [f"s{i}" for i in range(num_states)]
    per_state = _state_choices(states, max_actions, max_outcomes)
    for combo in itertools.product(per_state, repeat=num_states - 1):
        yield _graph_from_choices(states, combo)


def sample_graphs(num_states: int, count: int, seed: int = 0, max_actions: int = 2,
                  max_outcomes: int = 2) -> Iterator[FondTask]:
    """Uniform sample (with replacement) from the family of :func:`all_graphs`."""
    rng = random.Random(seed)
    states = [f"s{i}" for i in range(num_states)]
    per_state = _state_choices(states, max_actions, max_outcomes)
    for i in range(count):
        combo = [rng.choice(per_state) for _ in range(num_states - 1)]
        yield _graph_from_choices(states, combo, name=f"graph{num_states}-{seed}-{i}")


def random_strips(rng: random.Random, num_facts: int = 5, num_actions: int = 5,
                  max_effects: int = 2, name: str = "") -> FondTask:
    """Random STRIPS task; partitions group facts and actions in small blocks."""
    facts = [Fact(i, f"f{i}", i % 2) for i in range(num_facts)]
    actions = []
    for a in range(num_actions):
        pre = frozenset(rng.sample(range(num_facts), rng.randint(0, min(2, num_facts))))
        effects = []
        for _ in range(rng.randint(1, max_effects)):
            touched = rng.sample(range(num_facts), rng.randint(1, min(3, num_facts)))
            add = frozenset(f for f in touched if rng.random() < 0.5)
            effects.append(Effect(frozenset(touched) - add, add))
        actions.append(Action(a, f"act{a}", pre, tuple(dict.fromkeys(effects)), a % 2))
    init = [f for f in range(num_facts) if rng.random() < 0.4]
    goal = rng.sample(range(num_facts), rng.randint(1, 2))
    return FondTask(facts, actions, init, goal, name=name)


def mirrored_strips(rng: random.Random, half_facts: int = 3, half_actions: int = 3,
                    name: str = "") -> FondTask:
    """A random task copied twice over disjoint facts; swapping the copies is a symmetry."""
    base = random_strips(rng, half_facts, half_actions)
    n = half_facts
    facts = [Fact(i, f"{'L' if i < n else 'R'}{i % n}", base.facts[i % n].partition_id) for i in range(2 * n)]

    def shift(fs, k):
        return frozenset(f + k for f in fs)

    actions = []
    for k, side in ((0, "L"), (n, "R")):
        for a in base.actions:
            effects = tuple(Effect(shift(e.delete, k), shift(e.add, k)) for e in a.effects)
            actions.append(Action(len(actions), f"{side}{a.name}", shift(a.pre, k), effects, a.partition_id))
    init = list(base.init.true_facts())
    if rng.random() < 0.5:
        init += [f + n for f in init]
    goal = sorted(base.goal) + [f + n for f in base.goal]
    return FondTask(facts, actions, init, goal, name=name)


def random_policy(task: FondTask, rng: random.Random, max_size: int = 6):
    """Random policy built by extending from the empty policy."""
    from .policy import Policy

    policy = Policy.empty(task)
    for _ in range(rng.randint(0, max_size)):
        open_states = [s for s in policy.remain if task.applicable_actions(s)]
        if not open_states:
            break
        s = rng.choice(open_states)
        policy = policy.extend(s, rng.choice(task.applicable_actions(s)))
    return policy
