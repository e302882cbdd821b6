"""Reader, grounder and writer for a small FOND-PDDL subset.

Supported: ``:strips``, ``:typing``, ``:non-deterministic``; typed objects and
constants; positive-literal preconditions and goals; effects that are either a
conjunction of literals, a ``oneof`` of such conjunctions, or a top-level
``and`` containing literals and ``oneof`` groups (several groups combine as a
cross product).
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from .core import Action, Effect, Fact, FondTask
from .errors import GroundingExplosion, ParseError, UnsupportedFeature

SUPPORTED_REQUIREMENTS = {":strips", ":typing", ":non-deterministic"}
UNSUPPORTED_FORMS = {
    "or", "not", "imply", "forall", "exists", "when", "=", "increase", "decrease",
    "assign", "either", "probabilistic",
}
DEFAULT_GROUNDING_CAP = 100_000


class Token(str):
    line: int
    column: int

    def __new__(cls, text, line, column):
        tok = super().__new__(cls, text)
        tok.line = line
        tok.column = column
        return tok


class SList(list):
    """A parenthesized list that remembers where it opened."""

    def __init__(self, line, column):
        super().__init__()
        self.line = line
        self.column = column


_TOKEN_RE = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s()]+")


def _where(node):
    return getattr(node, "line", None), getattr(node, "column", None)


def read_sexpr(text: str) -> SList:
    stack: list[SList] = []
    result = None
    line, line_start = 1, 0
    for m in _TOKEN_RE.finditer(text):
        tok = m.group()
        col = m.start() - line_start + 1
        if tok[0].isspace() or tok[0] == ";":
            nl = tok.count("\n")
            if nl:
                line += nl
                line_start = m.start() + tok.rindex("\n") + 1
            continue
        if tok == "(":
            stack.append(SList(line, col))
        elif tok == ")":
            if not stack:
                raise ParseError("unbalanced ')'", line, col)
            done = stack.pop()
            if stack:
                stack[-1].append(done)
            elif result is None:
                result = done
            else:
                raise ParseError("trailing content after definition", done.line, done.column)
        else:
            if not stack:
                raise ParseError(f"unexpected token {tok!r}", line, col)
            stack[-1].append(Token(tok.lower(), line, col))
    if stack:
        raise ParseError("unbalanced '('", stack[-1].line, stack[-1].column)
    if result is None:
        raise ParseError("empty input", 1, 1)
    return result


@dataclass
class Atom:
    predicate: str
    args: tuple[str, ...]


@dataclass
class Schema:
    name: str
    params: list[tuple[str, str]]
    pre: list[Atom]
    effects: list[tuple[list[Atom], list[Atom]]]  # (add, delete) per branch


@dataclass
class Domain:
    name: str
    types: dict[str, str] = field(default_factory=dict)  # type -> parent
    constants: dict[str, str] = field(default_factory=dict)
    predicates: dict[str, list[str]] = field(default_factory=dict)
    schemas: list[Schema] = field(default_factory=list)


@dataclass
class Problem:
    name: str
    objects: dict[str, str]
    init: list[Atom]
    goal: list[Atom]


def _expect_list(node, what):
    if not isinstance(node, list):
        raise ParseError(f"expected {what}", *_where(node))
    return node


def _typed_list(items, what) -> list[tuple[str, str]]:
    out, pending = [], []
    i = 0
    while i < len(items):
        tok = items[i]
        if isinstance(tok, list):
            if tok and tok[0] == "either":
                raise UnsupportedFeature("either types", *_where(tok))
            raise ParseError(f"unexpected list in {what}", *_where(tok))
        if tok == "-":
            if i + 1 >= len(items):
                raise ParseError(f"missing type after '-' in {what}", tok.line, tok.column)
            typ = items[i + 1]
            if isinstance(typ, list):
                if typ and typ[0] == "either":
                    raise UnsupportedFeature("either types", *_where(typ))
                raise ParseError("bad type", *_where(typ))
            out.extend((name, str(typ)) for name in pending)
            pending = []
            i += 2
            continue
        pending.append(tok)
        i += 1
    out.extend((name, "object") for name in pending)
    return out


def _check_form(node):
    if isinstance(node, list) and node and isinstance(node[0], str) and node[0] in UNSUPPORTED_FORMS:
        what = "negative literal" if node[0] == "not" else f"'{node[0]}'"
        raise UnsupportedFeature(f"{what} is not supported here", *_where(node))


def _atom(node, predicates, variables, objects) -> Atom:
    _check_form(node)
    node = _expect_list(node, "an atom")
    if not node or isinstance(node[0], list):
        raise ParseError("malformed atom", *_where(node))
    pred = str(node[0])
    if pred not in predicates:
        raise ParseError(f"undeclared predicate {pred!r}", *_where(node[0]))
    args = []
    for arg in node[1:]:
        if isinstance(arg, list):
            raise ParseError("nested term", *_where(arg))
        if arg.startswith("?"):
            if variables is None or arg not in variables:
                raise ParseError(f"unknown variable {arg!r}", arg.line, arg.column)
        elif arg not in objects:
            raise ParseError(f"unknown object {arg!r}", arg.line, arg.column)
        args.append(str(arg))
    if len(args) != len(predicates[pred]):
        raise ParseError(f"{pred} expects {len(predicates[pred])} arguments", *_where(node))
    return Atom(pred, tuple(args))


def _conjunction(node, predicates, variables, objects) -> list[Atom]:
    node = _expect_list(node, "a formula")
    if not node:
        return []
    if node[0] == "and":
        out = []
        for part in node[1:]:
            out.extend(_conjunction(part, predicates, variables, objects))
        return out
    return [_atom(node, predicates, variables, objects)]


def _literal_effects(node, predicates, variables, objects):
    """Parse a deterministic effect into (add, delete) atom lists."""
    node = _expect_list(node, "an effect")
    if not node:
        return [], []
    head = node[0]
    if head == "and":
        add, dele = [], []
        for part in node[1:]:
            a, d = _literal_effects(part, predicates, variables, objects)
            add += a
            dele += d
        return add, dele
    if head == "oneof":
        raise UnsupportedFeature("nested 'oneof'", *_where(node))
    if head == "not":
        if len(node) != 2:
            raise ParseError("malformed negation", *_where(node))
        return [], [_atom(node[1], predicates, variables, objects)]
    return [_atom(node, predicates, variables, objects)], []


def _effect_branches(node, predicates, variables, objects):
    node = _expect_list(node, "an effect")
    groups: list[list[tuple[list[Atom], list[Atom]]]] = []
    fixed_add, fixed_del = [], []
    parts = node[1:] if node and node[0] == "and" else [node]
    for part in parts:
        if isinstance(part, list) and part and part[0] == "oneof":
            if len(part) < 2:
                raise ParseError("empty oneof", *_where(part))
            groups.append([_literal_effects(b, predicates, variables, objects) for b in part[1:]])
        else:
            a, d = _literal_effects(part, predicates, variables, objects)
            fixed_add += a
            fixed_del += d
    branches = []
    for combo in itertools.product(*groups):
        add, dele = list(fixed_add), list(fixed_del)
        for a, d in combo:
            add += a
            dele += d
        branches.append((add, dele))
    return branches


def _sections(node, start):
    out = {}
    for sec in node[start:]:
        sec = _expect_list(sec, "a section")
        if not sec or isinstance(sec[0], list):
            raise ParseError("malformed section", *_where(sec))
        out.setdefault(str(sec[0]), []).append(sec)
    return out


def _header(node, kind):
    if not node or node[0] != "define" or len(node) < 2:
        raise ParseError("expected (define ...)", *_where(node))
    head = _expect_list(node[1], f"({kind} name)")
    if len(head) != 2 or head[0] != kind:
        raise ParseError(f"expected ({kind} name)", *_where(head))
    return str(head[1])


def parse_domain(text: str) -> Domain:
    root = read_sexpr(text)
    dom = Domain(_header(root, "domain"))
    action_secs = []
    for sec in root[2:]:
        sec = _expect_list(sec, "a section")
        key = sec[0] if sec else None
        if key == ":requirements":
            for req in sec[1:]:
                if req not in SUPPORTED_REQUIREMENTS:
                    raise UnsupportedFeature(f"requirement {req}", *_where(req))
        elif key == ":types":
            for name, parent in _typed_list(sec[1:], "types"):
                dom.types[name] = parent
        elif key == ":constants":
            dom.constants.update(_typed_list(sec[1:], "constants"))
        elif key == ":predicates":
            for p in sec[1:]:
                p = _expect_list(p, "a predicate declaration")
                dom.predicates[str(p[0])] = [t for _, t in _typed_list(p[1:], "predicate")]
        elif key == ":action":
            action_secs.append(sec)  # parsed once every declaration is known
        elif key in (":functions", ":derived", ":axiom", ":constraints"):
            raise UnsupportedFeature(f"section {key}", *_where(sec))
        else:
            raise ParseError(f"unknown domain section {key!r}", *_where(sec))
    for parent in list(dom.types.values()):
        if parent != "object":
            dom.types.setdefault(parent, "object")
    dom.types.pop("object", None)
    for known in [*dom.constants.values(), *(t for ts in dom.predicates.values() for t in ts)]:
        if known != "object" and known not in dom.types:
            raise ParseError(f"unknown type {known!r}")
    dom.schemas = [_parse_schema(sec, dom) for sec in action_secs]
    return dom


def _parse_schema(sec, dom: Domain) -> Schema:
    if len(sec) < 2 or isinstance(sec[1], list):
        raise ParseError("action without a name", *_where(sec))
    name = str(sec[1])
    fields = {}
    i = 2
    while i < len(sec):
        key = sec[i]
        if isinstance(key, list) or not key.startswith(":") or i + 1 >= len(sec):
            raise ParseError(f"malformed action {name}", *_where(key))
        fields[str(key)] = sec[i + 1]
        i += 2
    unknown = set(fields) - {":parameters", ":precondition", ":effect"}
    if unknown:
        raise UnsupportedFeature(f"action field {sorted(unknown)[0]}", *_where(sec))
    params = _typed_list(_expect_list(fields.get(":parameters", []), "a parameter list"), "parameters")
    for _, t in params:
        if t != "object" and t not in dom.types:
            raise ParseError(f"unknown type {t!r} in action {name}", *_where(sec))
    variables = {p for p, _ in params}
    pre = _conjunction(fields.get(":precondition", []), dom.predicates, variables, dom.constants)
    if ":effect" not in fields:
        raise ParseError(f"action {name} has no effect", *_where(sec))
    effects = _effect_branches(fields[":effect"], dom.predicates, variables, dom.constants)
    return Schema(name, params, pre, effects)


def parse_problem(text: str, domain: Domain) -> Problem:
    root = read_sexpr(text)
    name = _header(root, "problem")
    objects = dict(domain.constants)
    init, goal = [], []
    secs = _sections(root, 2)
    for obj_sec in secs.get(":objects", []):
        for obj, typ in _typed_list(obj_sec[1:], "objects"):
            if typ != "object" and typ not in domain.types:
                raise ParseError(f"unknown type {typ!r}", obj.line, obj.column)
            objects[obj] = typ
    for key, nodes in secs.items():
        if key not in (":domain", ":objects", ":init", ":goal", ":requirements"):
            raise UnsupportedFeature(f"problem section {key}", *_where(nodes[0]))
    for dom_sec in secs.get(":domain", []):
        if len(dom_sec) != 2 or dom_sec[1] != domain.name:
            raise ParseError("problem refers to a different domain", *_where(dom_sec))
    for init_sec in secs.get(":init", []):
        for node in init_sec[1:]:
            init.append(_atom(node, domain.predicates, None, objects))
    goal_secs = secs.get(":goal", [])
    if len(goal_secs) != 1 or len(goal_secs[0]) != 2:
        raise ParseError("problem needs exactly one goal formula", *_where(root))
    goal = _conjunction(goal_secs[0][1], domain.predicates, None, objects)
    return Problem(name, objects, init, goal)


def _subtypes(domain: Domain) -> dict[str, set[str]]:
    """Each type mapped to itself and all its descendants."""
    out = {"object": {"object"}}
    for t in domain.types:
        out.setdefault(t, set()).add(t)
    for t in list(domain.types):
        seen = set()
        parent = t
        while parent != "object":
            if parent in seen:
                raise ParseError(f"cyclic type hierarchy at {t!r}")
            seen.add(parent)
            parent = domain.types.get(parent, "object")
            out.setdefault(parent, {parent}).add(t)
    return out


def _atom_name(pred: str, args) -> str:
    return f"{pred}({','.join(args)})" if args else pred


def ground(domain: Domain, problem: Problem, cap: int = DEFAULT_GROUNDING_CAP) -> FondTask:
    """Ground every schema over all type-consistent bindings.

    Predicates that no effect touches are static: their atoms are folded into
    applicability and never become facts.
    """
    subtypes = _subtypes(domain)
    by_type: dict[str, list[str]] = {}
    for obj in sorted(problem.objects):
        typ = problem.objects[obj]
        for t, subs in subtypes.items():
            if typ in subs:
                by_type.setdefault(t, []).append(obj)

    fluent = {
        atom.predicate
        for schema in domain.schemas
        for add, dele in schema.effects
        for atom in add + dele
    }
    init_atoms = {(a.predicate, a.args) for a in problem.init}
    static_true = {a for a in init_atoms if a[0] not in fluent}
    pred_index = {p: i for i, p in enumerate(domain.predicates)}

    grounded = []  # (schema index, binding, pre, [(add, del)])
    for sidx, schema in enumerate(domain.schemas):
        domains = [by_type.get(t, []) for _, t in schema.params]
        names = [p for p, _ in schema.params]
        for values in itertools.product(*domains):
            env = dict(zip(names, values))

            def sub(atom):
                return atom.predicate, tuple(env.get(x, x) for x in atom.args)

            pre = [sub(a) for a in schema.pre]
            if any(p[0] not in fluent and p not in static_true for p in pre):
                continue
            effs = [([sub(a) for a in add], [sub(a) for a in dele]) for add, dele in schema.effects]
            grounded.append((sidx, values, [p for p in pre if p[0] in fluent], effs))
            if len(grounded) > cap:
                raise GroundingExplosion(f"more than {cap} grounded actions")

    atoms = {a for a in init_atoms if a[0] in fluent}
    goal_atoms = [(a.predicate, a.args) for a in problem.goal]
    unreachable_goal = any(g[0] not in fluent and g not in static_true for g in goal_atoms)
    atoms.update(g for g in goal_atoms if g[0] in fluent)
    for _, _, pre, effs in grounded:
        atoms.update(pre)
        for add, dele in effs:
            atoms.update(add)
            atoms.update(dele)
    if unreachable_goal:
        # a static goal atom that is false: keep it as a fact nobody adds
        atoms.update(g for g in goal_atoms if g[0] not in fluent and g not in static_true)

    ordered = sorted(atoms, key=lambda a: (pred_index[a[0]], a[1]))
    fact_id = {a: i for i, a in enumerate(ordered)}
    facts = [Fact(i, _atom_name(*a), pred_index[a[0]]) for i, a in enumerate(ordered)]

    actions = []
    for sidx, values, pre, effs in grounded:
        effects = []
        seen = set()
        for add, dele in effs:
            add_ids = frozenset(fact_id[a] for a in add)
            del_ids = frozenset(fact_id[a] for a in dele) - add_ids
            key = (add_ids, del_ids)
            if key not in seen:
                seen.add(key)
                effects.append(Effect(del_ids, add_ids))
        name = _atom_name(domain.schemas[sidx].name, values)
        actions.append(
            Action(len(actions), name, frozenset(fact_id[p] for p in pre), tuple(effects), sidx)
        )

    init = [fact_id[a] for a in init_atoms if a in fact_id]
    goal = [fact_id[g] for g in goal_atoms if g in fact_id]
    return FondTask(facts, actions, init, goal, name=problem.name)


def parse_pddl(domain_text: str, problem_text: str, cap: int = DEFAULT_GROUNDING_CAP) -> FondTask:
    domain = parse_domain(domain_text)
    return ground(domain, parse_problem(problem_text, domain), cap)


_NAME_RE = re.compile(r"^([^()]+)\((.*)\)$")


def _split_name(name: str):
    m = _NAME_RE.match(name)
    if m:
        return m.group(1), tuple(x for x in m.group(2).split(",") if x)
    return name, ()


def _ident(name: str) -> str:
    out = re.sub(r"[^A-Za-z0-9_-]+", "_", name).strip("_").lower()
    if not out or not out[0].isalpha():
        out = "a_" + out
    return out


def write_pddl(task: FondTask, domain_name: str = "grounded") -> tuple[str, str]:
    """Write a grounded task as a domain of parameterless actions plus a problem.

    Fact names of the form ``pred(a,b)`` become atoms over constants, so
    reading the result back yields the same facts and fact partitions.
    Action names are made into identifiers, one schema per grounded action.
    """
    arity: dict[str, int] = {}
    partition: dict[str, int] = {}
    atoms = []
    constants = set()
    for f in task.facts:
        pred, args = _split_name(f.name)
        pred = pred if pred.startswith("__") else _ident(pred)
        if arity.setdefault(pred, len(args)) != len(args):
            raise ValueError(f"predicate {pred} used with different arities")
        partition.setdefault(pred, f.partition_id)
        constants.update(args)
        atoms.append("(" + " ".join((pred, *args)) + ")")

    def conj(facts):
        facts = sorted(facts)
        if len(facts) == 1:
            return atoms[facts[0]]
        return "(and " + " ".join(atoms[f] for f in facts) + ")"

    def effect_text(e: Effect):
        parts = [atoms[f] for f in sorted(e.add)] + [f"(not {atoms[f]})" for f in sorted(e.delete)]
        return "(and " + " ".join(parts) + ")" if len(parts) != 1 else parts[0]

    # Declaring predicates at their partition index keeps fact partitions
    # stable on re-reading; gaps are filled with unused padding predicates.
    pred_order = list(arity)
    if len(set(partition.values())) == len(partition):
        slots = {pid: p for p, pid in partition.items()}
        pred_order = [slots.get(i, f"unused-{i}") for i in range(max(slots) + 1)]
        for p in pred_order:
            arity.setdefault(p, 0)
    lines = [f"(define (domain {domain_name})", "  (:requirements :strips :non-deterministic)"]
    if constants:
        lines.append("  (:constants " + " ".join(sorted(constants)) + ")")
    lines.append("  (:predicates")
    for p in pred_order:
        args = " ".join(f"?x{i}" for i in range(arity[p]))
        lines.append(f"    ({p}{' ' + args if args else ''})")
    lines.append("  )")
    used = set()
    for a in task.actions:
        name = _ident(a.name)
        while name in used:
            name += "_"
        used.add(name)
        lines.append(f"  (:action {name}")
        lines.append("    :parameters ()")
        lines.append(f"    :precondition {conj(a.pre) if a.pre else '(and)'}")
        if len(a.effects) == 1:
            lines.append(f"    :effect {effect_text(a.effects[0])})")
        else:
            lines.append("    :effect (oneof " + " ".join(effect_text(e) for e in a.effects) + "))")
    lines.append(")")
    domain_text = "\n".join(lines) + "\n"

    init = " ".join(atoms[f] for f in sorted(task.init.true_facts()))
    goal = conj(task.goal) if task.goal else "(and)"
    problem_text = (
        f"(define (problem {_ident(task.name or 'task')})\n"
        f"  (:domain {domain_name})\n"
        f"  (:init {init})\n"
        f"  (:goal {goal}))\n"
    )
    return domain_text, problem_text
