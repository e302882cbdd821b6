"""Command-line entry point: ``plan solve|validate|compress|bench|symmetries``."""
from __future__ import annotations

import argparse
import os
import sys
from collections import Counter
from pathlib import Path

from .bench import BenchTask, RunRecord, discover_tasks, records_csv, run_bench, summarize, summary_csv
from .compressor import compress
from .core import FondTask
from .errors import PlannerError, ResourceLimit
from .explicit import parse_explicit
from .heuristics import KINDS, Algorithm, ClassicalHeuristic
from .microtasks import micro_task_stream
from .partial import PartialPolicy, pruned_policy
from .pddl import parse_pddl
from .policy_io import read_policy, write_policy
from .search import SearchConfig, run_planner, scripted_selector
from .symmetry import DEFAULT_ORBIT_BUDGET, SymmetryContext, find_generators
from .validator import Verdict, verify_strong_cyclic

EXIT_SOLVED, EXIT_INPUT, EXIT_BOTTOM, EXIT_LIMIT = 0, 1, 2, 3

PRESETS = {
    "identity": "identity",
    "lanes": "lanes",
    "domain-frontier": "domain_frontier",
    "frontier": "frontier",
    "frontier-sym": "frontier_symmetric",
}


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors; exit status 2 means an unsolvable task
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _on_off(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return text == "on"


def _algorithm(text: str) -> Algorithm:
    try:
        return Algorithm.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def load_task(paths: list[str]) -> FondTask:
    """A single ``.json`` explicit graph, or a PDDL domain and problem pair."""
    if len(paths) == 1:
        path = Path(paths[0])
        return parse_explicit(path.read_text(), name=path.stem.removesuffix(".fond"))
    if len(paths) == 2:
        dom, prob = (Path(p) for p in paths)
        task = parse_pddl(dom.read_text(), prob.read_text())
        task.name = prob.stem
        return task
    raise PlannerError("expected one .json task or a domain and problem .pddl pair")


def _split_policy_args(paths: list[str]) -> tuple[list[str], str]:
    if len(paths) not in (2, 3):
        raise PlannerError("expected task file(s) followed by a policy file")
    return paths[:-1], paths[-1]


def _search_flags(p: argparse.ArgumentParser):
    p.add_argument("--pruning", choices=list(PRESETS), default="domain-frontier")
    p.add_argument("--algorithm", type=_algorithm, default=Algorithm())
    p.add_argument("--heuristic", choices=KINDS, default="hmax")
    p.add_argument("--deadlock-detection", type=_on_off, default=False, metavar="on|off")
    p.add_argument("--concretizer", type=_on_off, default=True, metavar="on|off")
    p.add_argument("--goal-merging", type=_on_off, default=True, metavar="on|off")
    p.add_argument("--max-policies", type=int)
    p.add_argument("--time-limit", type=float)
    p.add_argument("--symmetry", choices=("none", "greedy", "canonical"), default="canonical")
    p.add_argument("--symmetry-time-budget", type=float, default=5.0)
    p.add_argument("--orbit-budget", type=int, default=DEFAULT_ORBIT_BUDGET)
    p.add_argument("--compress", type=_on_off, default=False, metavar="on|off")
    p.add_argument("--solver-node-budget", type=int)


def _config(args, task: FondTask | None, pruning: str | None = None) -> SearchConfig:
    pruning = PRESETS[pruning or args.pruning]
    symmetry = None
    if pruning == "frontier_symmetric" and task is not None:
        symmetry = SymmetryContext.build(task, args.symmetry, args.symmetry_time_budget, args.orbit_budget)
    return SearchConfig(
        pruning=pruning,
        algorithm=args.algorithm,
        deadlock_detection=args.deadlock_detection,
        use_concretizer=args.concretizer,
        goal_merging=args.goal_merging,
        max_policies=args.max_policies,
        time_limit=args.time_limit,
        symmetry=symmetry,
    )


def _write(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_solve(args) -> int:
    task = load_task(args.task)
    config = _config(args, task)
    if args.expansion_order:
        names = Path(args.expansion_order).read_text().split()
        try:
            order = [task.named_state(n) for n in names]
        except KeyError as exc:
            raise PlannerError(f"unknown state {exc.args[0]!r} in expansion order") from None
        config.selector = scripted_selector(order)
    heuristic = ClassicalHeuristic(task, args.heuristic)
    try:
        result = run_planner(task, config, heuristic)
    except ResourceLimit as exc:
        stats = exc.stats
        print(f"{exc.kind} after {stats.generated} generated policies", file=sys.stderr)
        _write_stats(args, task, config, exc.kind, stats)
        return EXIT_LIMIT
    stats = result.stats
    line = (f"generated={stats.generated} expanded={stats.expanded} "
            f"pruned_by_equivalence={stats.pruned_by_equivalence} "
            f"pruned_by_deadlock={stats.pruned_by_deadlock} "
            f"solutions_from_concretizer={stats.solutions_from_concretizer} "
            f"backup_used={str(result.backup_used).lower()}")
    if not result.solved:
        print(f"no solution; {line}", file=sys.stderr)
        _write_stats(args, task, config, "bottom", stats)
        return EXIT_BOTTOM
    verdict = verify_strong_cyclic(task, result.policy)
    if not verdict.ok:
        raise AssertionError(f"planner returned a non-solution:\n{verdict.report(task)}")
    print(f"solved |policy|={len(result.policy)} {line}", file=sys.stderr)
    _write(write_policy(task, result.policy), args.output)
    compressed = None
    if args.compress:
        tau = compress(task, result.policy, args.solver_node_budget)
        compressed = len(tau)
        print(f"compressed |policy|={compressed}", file=sys.stderr)
        if args.compressed_output:
            _write(write_policy(task, tau), args.compressed_output)
    _write_stats(args, task, config, "solved", stats, len(result.policy), compressed)
    return EXIT_SOLVED


def _write_stats(args, task, config, outcome, stats, size=None, compressed=None):
    if not args.stats:
        return
    record = RunRecord(task.name, "", config.fingerprint(), outcome, stats.time, stats.generated, size, compressed)
    _write(records_csv([record], timing=True), args.stats)


def _partial_verdict(task: FondTask, tau: PartialPolicy) -> Verdict:
    pruned, clean = pruned_policy(task, tau)
    verdict = Verdict()
    if not clean:
        verdict.violations.append(("buggy", "a reached state matches rules with different actions"))
    if pruned is None:
        verdict.violations.append(("applicability", "a reached rule's action is not applicable"))
        return verdict
    verdict.violations.extend(verify_strong_cyclic(task, pruned).violations)
    return verdict


def cmd_validate(args) -> int:
    task_paths, policy_path = _split_policy_args(args.paths)
    task = load_task(task_paths)
    policy = read_policy(task, Path(policy_path).read_text(), as_mapping=True)
    if isinstance(policy, PartialPolicy):
        verdict = _partial_verdict(task, policy)
    else:
        verdict = verify_strong_cyclic(task, policy)
    print(verdict.report(task))
    return 0 if verdict.ok else 1


def cmd_compress(args) -> int:
    task_paths, policy_path = _split_policy_args(args.paths)
    task = load_task(task_paths)
    policy = read_policy(task, Path(policy_path).read_text())
    if isinstance(policy, PartialPolicy):
        raise PlannerError("policy is already a partial-state policy")
    tau = compress(task, policy, args.solver_node_budget)
    print(f"{len(policy)} state mappings -> {len(tau)} partial-state rules", file=sys.stderr)
    _write(write_policy(task, tau), args.output)
    return 0


def _micro_tasks(count: int) -> list[BenchTask]:
    seed = int(os.environ.get("PLANNER_SEED", "0"))
    return [BenchTask(t.name, "micro", lambda t=t: t) for t in micro_task_stream(seed, count)]


def cmd_bench(args) -> int:
    if (args.directory is None) == (args.micro is None):
        raise PlannerError("give either a task directory or --micro N")
    tasks = _micro_tasks(args.micro) if args.micro is not None else discover_tasks(Path(args.directory))
    if not tasks:
        raise PlannerError("no tasks found")
    names = [c.strip() for c in args.configs.split(",") if c.strip()]
    unknown = [c for c in names if c not in PRESETS]
    if unknown:
        raise PlannerError(f"unknown config(s): {', '.join(unknown)}")
    configs = [(name, _config(args, None, name)) for name in names]
    records = run_bench(tasks, configs, args.heuristic, args.compress)
    _write(records_csv(records, args.timing), args.output)
    if args.summary:
        _write(summary_csv(summarize(records), args.timing), args.summary)
    return 0


def cmd_symmetries(args) -> int:
    task = load_task(args.task)
    group = find_generators(task, args.symmetry_time_budget)
    print(f"generators: {len(group)}")
    if group.timed_out:
        print("generator search timed out; using the trivial group")
    for i, g in enumerate(group.generators):
        moved = [f"{task.facts[f].name}->{task.facts[t].name}" for f, t in enumerate(g.facts) if f != t]
        print(f"  g{i}: {' '.join(moved)}")
    states = task.reachable_states(limit=args.state_limit)
    sizes = Counter()
    seen = set()
    for s in states:
        if s in seen:
            continue
        orbit = group.orbit(s)
        seen.update(orbit)
        sizes[len(orbit)] += 1
    print(f"init orbit size: {len(group.orbit(task.init))}")
    print(f"reachable states: {len(states)}")
    for size in sorted(sizes):
        print(f"  orbits of size {size}: {sizes[size]}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="plan", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="search for a strong-cyclic policy")
    p.add_argument("task", nargs="+", help="task.json, or domain.pddl problem.pddl")
    _search_flags(p)
    p.add_argument("--expansion-order", metavar="FILE", help="state names to expand first, in order")
    p.add_argument("--output", "-o", help="policy document path (default: stdout)")
    p.add_argument("--compressed-output", help="partial-state policy document path")
    p.add_argument("--stats", metavar="FILE", help="write a one-row stats CSV")
    p.set_defaults(run=cmd_solve)

    p = sub.add_parser("validate", help="check a policy document against a task")
    p.add_argument("paths", nargs="+", metavar="PATH", help="task file(s) then the policy file")
    p.set_defaults(run=cmd_validate)

    p = sub.add_parser("compress", help="compress a state policy into partial-state rules")
    p.add_argument("paths", nargs="+", metavar="PATH", help="task file(s) then the policy file")
    p.add_argument("--solver-node-budget", type=int)
    p.add_argument("--output", "-o")
    p.set_defaults(run=cmd_compress)

    p = sub.add_parser("bench", help="run configurations over a task set and write CSV")
    p.add_argument("directory", nargs="?")
    p.add_argument("--micro", type=int, metavar="N", help="use N seeded micro-tasks (seed: $PLANNER_SEED)")
    p.add_argument("--configs", default="identity,lanes,domain-frontier,frontier")
    _search_flags(p)
    p.add_argument("--output", "-o", help="per-run CSV path (default: stdout)")
    p.add_argument("--summary", help="per-domain summary CSV path")
    p.add_argument("--timing", action="store_true", help="include wall-clock columns")
    p.set_defaults(run=cmd_bench)

    p = sub.add_parser("symmetries", help="print symmetry generators and orbit sizes")
    p.add_argument("task", nargs="+")
    p.add_argument("--symmetry-time-budget", type=float, default=5.0)
    p.add_argument("--state-limit", type=int, default=10_000)
    p.set_defaults(run=cmd_symmetries)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # --help and usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    try:
        return args.run(args)
    except (PlannerError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
