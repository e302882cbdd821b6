"""JSON policy documents for state policies and partial-state policies."""
from __future__ import annotations

import json
from typing import TextIO

import jsonschema

from .core import FondTask
from .errors import SchemaError
from .partial import PartialPolicy, PartialState
from .policy import Policy

POLICY_SCHEMA = {
    "type": "object",
    "required": ["task_hash", "kind", "mappings"],
    "properties": {
        "task_hash": {"type": "string"},
        "kind": {"enum": ["state", "partial"]},
        "mappings": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["condition", "action"],
                "properties": {"condition": {"type": "object"}, "action": {"type": "string"}},
            },
        },
    },
}


def _full_condition(task: FondTask, bits: int) -> dict[str, bool]:
    return {f.name: bool(bits >> f.id & 1) for f in task.facts}


def policy_document(task: FondTask, policy: Policy | PartialPolicy) -> dict:
    if isinstance(policy, PartialPolicy):
        records = [
            {
                "condition": {task.facts[f].name: v for f, v in p.literals()},
                "action": task.actions[a].name,
            }
            for p, a in policy.sorted_rules()
        ]
        kind = "partial"
    else:
        records = []
        for s in sorted(policy.domain):
            if task.state_names and s.bits in task.state_names:
                cond = {"state": task.state_names[s.bits]}
            else:
                cond = _full_condition(task, s.bits)
            records.append({"condition": cond, "action": task.actions[policy[s]].name})
        kind = "state"
    return {"task_hash": task.fingerprint(), "kind": kind, "mappings": records}


def write_policy(task: FondTask, policy: Policy | PartialPolicy, sink: TextIO | None = None) -> str:
    text = json.dumps(policy_document(task, policy), indent=2) + "\n"
    if sink is not None:
        sink.write(text)
    return text


def read_policy(task: FondTask, text: str, check_hash: bool = True, as_mapping: bool = False):
    """Parse a policy document.

    State documents become a :class:`Policy`, or a plain ``{state: action}``
    dict with ``as_mapping`` (no applicability checks, for validation).
    """
    try:
        doc = json.loads(text)
        jsonschema.validate(doc, POLICY_SCHEMA)
    except (json.JSONDecodeError, jsonschema.ValidationError) as exc:
        raise SchemaError(f"bad policy document: {exc}") from exc
    if check_hash and doc["task_hash"] != task.fingerprint():
        raise SchemaError("policy was written for a different task")

    def action_of(rec):
        try:
            return task.action_id(rec["action"])
        except KeyError:
            raise SchemaError(f"unknown action {rec['action']!r}") from None

    def fact_of(name):
        try:
            return task.fact_index[name]
        except KeyError:
            raise SchemaError(f"unknown fact {name!r}") from None

    if doc["kind"] == "partial":
        rules = {}
        for rec in doc["mappings"]:
            p = PartialState.from_literals((fact_of(k), bool(v)) for k, v in rec["condition"].items())
            if p in rules:
                raise SchemaError("partial state listed twice")
            rules[p] = action_of(rec)
        return PartialPolicy(rules)

    mapping = {}
    for rec in doc["mappings"]:
        cond = rec["condition"]
        if set(cond) == {"state"} and task.state_names:
            try:
                s = task.named_state(cond["state"])
            except KeyError:
                raise SchemaError(f"unknown state {cond['state']!r}") from None
        else:
            s = task.state_from_facts(fact_of(k) for k, v in cond.items() if v)
        if s in mapping:
            raise SchemaError(f"state listed twice: {task.describe(s)}")
        mapping[s] = action_of(rec)
    if as_mapping:
        return mapping
    return Policy.from_mapping(task, mapping)
