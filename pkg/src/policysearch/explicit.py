"""Explicit state-graph tasks (JSON), encoded as one fact per named state."""
from __future__ import annotations

import json
from collections import Counter
from typing import Iterable, Sequence

import jsonschema

from .core import Action, Effect, Fact, FondTask
from .errors import DanglingStateReference, SchemaError

GOAL_MARKER = "__goal__"

EXPLICIT_SCHEMA = {
    "type": "object",
    "required": ["states", "init", "goals", "actions"],
    "properties": {
        "states": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "init": {"type": "string"},
        "goals": {"type": "array", "items": {"type": "string"}},
        "actions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label", "from", "outcomes"],
                "properties": {
                    "label": {"type": "string"},
                    "from": {"type": "string"},
                    "outcomes": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                },
            },
        },
    },
}


def explicit_task(
    states: Sequence[str],
    init: str,
    goals: Iterable[str],
    actions: Sequence[tuple[str, str, Sequence[str]]],
    name: str = "",
) -> FondTask:
    """Build a task from named states and ``(label, from, outcomes)`` triples.

    Each state gets its own fact.  With exactly one goal state the goal is that
    state's fact; otherwise an extra marker fact is true in every goal state.
    """
    states = list(states)
    if len(set(states)) != len(states):
        raise SchemaError("duplicate state names")
    index = {s: i for i, s in enumerate(states)}
    goals = list(dict.fromkeys(goals))
    for ref in [init, *goals, *(a[1] for a in actions), *(o for a in actions for o in a[2])]:
        if ref not in index:
            raise DanglingStateReference(f"unknown state {ref!r}")
    seen_pairs = set()
    for label, src, _ in actions:
        if (label, src) in seen_pairs:
            raise SchemaError(f"action {label!r} declared twice from {src!r}")
        seen_pairs.add((label, src))

    facts = [Fact(i, s, 0) for i, s in enumerate(states)]
    marker = None
    if len(goals) != 1:
        marker = len(facts)
        facts.append(Fact(marker, GOAL_MARKER, 1))
    goal_set = set(goals)

    def facts_of(s: str) -> frozenset[int]:
        out = {index[s]}
        if marker is not None and s in goal_set:
            out.add(marker)
        return frozenset(out)

    label_count = Counter(label for label, _, _ in actions)
    built = []
    for aid, (label, src, outcomes) in enumerate(actions):
        effects = []
        for o in dict.fromkeys(outcomes):
            before, after = facts_of(src), facts_of(o)
            effects.append(Effect(before - after, after - before))
        aname = label if label_count[label] == 1 else f"{label}@{src}"
        built.append(Action(aid, aname, frozenset([index[src]]), tuple(effects), 0))

    goal_facts = [index[goals[0]]] if marker is None else [marker]
    state_names = {}
    for s in states:
        bits = 0
        for f in facts_of(s):
            bits |= 1 << f
        state_names[bits] = s
    return FondTask(facts, built, facts_of(init), goal_facts, state_names=state_names, name=name)


def parse_explicit(json_text: str, name: str = "") -> FondTask:
    try:
        doc = json.loads(json_text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    try:
        jsonschema.validate(doc, EXPLICIT_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaError(exc.message) from exc
    actions = [(a["label"], a["from"], a["outcomes"]) for a in doc["actions"]]
    return explicit_task(doc["states"], doc["init"], doc["goals"], actions, name=name)


def explicit_document(task: FondTask) -> dict:
    """Inverse of :func:`parse_explicit` for tasks built from explicit graphs."""
    if not task.state_names:
        raise SchemaError("task was not built from an explicit graph")
    by_name = {n: bits for bits, n in task.state_names.items()}
    states = [f.name for f in task.facts if f.name in by_name]
    goals = [n for n in states if task.is_goal(task.state(by_name[n]))]
    actions = []
    for a in task.actions:
        (pre_fact,) = a.pre
        src = task.facts[pre_fact].name
        head = task.state(by_name[src])
        outcomes = [task.state_names[t.bits] for t in task.successor_list(head, a.id)]
        label = a.name[: -len(src) - 1] if a.name.endswith("@" + src) else a.name
        actions.append({"label": label, "from": src, "outcomes": outcomes})
    return {
        "states": states,
        "init": task.state_names[task.init.bits],
        "goals": goals,
        "actions": actions,
    }


def write_explicit(task: FondTask) -> str:
    return json.dumps(explicit_document(task), indent=2) + "\n"
