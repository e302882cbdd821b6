"""Benchmark harness: run configurations over task sets and aggregate the results."""
from __future__ import annotations

import csv
import io
import math
import statistics
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .compressor import compress
from .core import FondTask
from .errors import ResourceLimit
from .explicit import parse_explicit
from .heuristics import ClassicalHeuristic
from .partial import validate_partial_solution
from .pddl import parse_pddl
from .search import SearchConfig, run_planner
from .validator import verify_strong_cyclic

RECORD_COLUMNS = ["task", "domain", "config", "outcome", "time_s", "generated", "solution_size", "compressed_size"]


@dataclass
class RunRecord:
    task: str
    domain: str
    config: str
    outcome: str  # solved | bottom | time-limit | policy-limit
    time_s: float
    generated: int
    solution_size: int | None = None
    compressed_size: int | None = None


@dataclass
class BenchTask:
    name: str
    domain: str
    load: Callable[[], FondTask]


def discover_tasks(root: Path) -> list[BenchTask]:
    """Explicit ``*.json`` graphs and PDDL problems, one domain per directory.

    A directory holding ``domain.pddl`` treats every other ``.pddl`` file in it
    as a problem of that domain.
    """
    root = Path(root)
    found = []
    for directory in sorted([root, *[p for p in root.rglob("*") if p.is_dir()]]):
        domain = directory.name
        for path in sorted(directory.glob("*.json")):
            found.append(BenchTask(path.stem.removesuffix(".fond"), domain,
                                   lambda p=path: parse_explicit(p.read_text(), name=p.stem)))
        dom_file = directory / "domain.pddl"
        if dom_file.exists():
            for path in sorted(directory.glob("*.pddl")):
                if path.name == "domain.pddl":
                    continue
                found.append(BenchTask(path.stem, domain,
                                       lambda d=dom_file, p=path: parse_pddl(d.read_text(), p.read_text())))
    return found


def run_one(bt: BenchTask, config_name: str, config: SearchConfig, heuristic: str = "hmax",
            with_compression: bool = False) -> RunRecord:
    task = bt.load()
    h = ClassicalHeuristic(task, heuristic)
    try:
        result = run_planner(task, config, h)
    except ResourceLimit as exc:
        stats = exc.stats
        return RunRecord(bt.name, bt.domain, config_name, exc.kind,
                         stats.time if stats else 0.0, stats.generated if stats else 0)
    stats = result.stats
    if not result.solved:
        return RunRecord(bt.name, bt.domain, config_name, "bottom", stats.time, stats.generated)
    verdict = verify_strong_cyclic(task, result.policy)
    if not verdict.ok:
        raise AssertionError(f"{bt.name}: planner returned a non-solution\n{verdict.report(task)}")
    compressed = None
    if with_compression:
        tau = compress(task, result.policy)
        if not validate_partial_solution(task, tau):
            raise AssertionError(f"{bt.name}: compressed policy is not a solution")
        compressed = len(tau)
    return RunRecord(bt.name, bt.domain, config_name, "solved", stats.time, stats.generated,
                     len(result.policy), compressed)


def run_bench(tasks: Sequence[BenchTask], configs: Sequence[tuple[str, SearchConfig]],
              heuristic: str = "hmax", with_compression: bool = False) -> list[RunRecord]:
    records = []
    for bt in tasks:
        for name, config in configs:
            records.append(run_one(bt, name, replace(config), heuristic, with_compression))
    return records


def _fmt(value, digits=4):
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.{digits}f}"
    return str(value)


def records_csv(records: Iterable[RunRecord], timing: bool = False) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(RECORD_COLUMNS)
    for r in records:
        writer.writerow([r.task, r.domain, r.config, r.outcome, _fmt(r.time_s) if timing else "",
                         r.generated, _fmt(r.solution_size), _fmt(r.compressed_size)])
    return out.getvalue()


def geometric_mean(values: Sequence[float]) -> float:
    """Geometric mean; 0 when any value is not positive."""
    if not values:
        return math.nan
    if any(v <= 0 for v in values):
        return 0.0
    return statistics.geometric_mean(values)


METRICS = ("time_s", "generated", "solution_size", "compressed_size")


def summarize(records: Sequence[RunRecord]) -> list[dict]:
    """Per-domain and TOTAL rows for every configuration.

    Outcome ratios are per domain; metric means are taken over the tasks
    every configuration solved.  TOTAL weighs domains equally: arithmetic
    mean for ratios, geometric mean for the metric means.
    """
    configs = list(dict.fromkeys(r.config for r in records))
    domains = list(dict.fromkeys(r.domain for r in records))
    by_key = {(r.domain, r.task, r.config): r for r in records}
    rows = []
    per_config_domain: dict[tuple[str, str], dict] = {}
    for domain in domains:
        tasks = list(dict.fromkeys(r.task for r in records if r.domain == domain))
        common = [
            t for t in tasks
            if all(by_key.get((domain, t, c)) and by_key[(domain, t, c)].outcome == "solved" for c in configs)
        ]
        for c in configs:
            recs = [by_key[(domain, t, c)] for t in tasks if (domain, t, c) in by_key]
            n = len(recs)
            row = {"domain": domain, "config": c, "tasks": n, "common_solved": len(common)}
            for outcome, col in (("solved", "solved"), ("time-limit", "time_limit"),
                                 ("policy-limit", "policy_limit")):
                row[col] = sum(r.outcome == outcome for r in recs) / n if n else math.nan
            for m in METRICS:
                vals = [getattr(by_key[(domain, t, c)], m) for t in common]
                vals = [v for v in vals if v is not None]
                row[m] = statistics.fmean(vals) if vals else None
            rows.append(row)
            per_config_domain[(c, domain)] = row
    for c in configs:
        drows = [per_config_domain[(c, d)] for d in domains]
        total = {"domain": "TOTAL", "config": c, "tasks": sum(r["tasks"] for r in drows),
                 "common_solved": sum(r["common_solved"] for r in drows)}
        for col in ("solved", "time_limit", "policy_limit"):
            total[col] = statistics.fmean(r[col] for r in drows)
        for m in METRICS:
            vals = [r[m] for r in drows if r[m] is not None]
            total[m] = geometric_mean(vals) if vals else None
        rows.append(total)
    return rows


def summary_csv(rows: Sequence[dict], timing: bool = False) -> str:
    cols = ["domain", "config", "tasks", "solved", "time_limit", "policy_limit", "common_solved",
            *(["time_s"] if timing else []), "generated", "solution_size", "compressed_size"]
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(cols)
    for row in rows:
        writer.writerow([_fmt(row[c], 6 if c == "time_s" else 2) for c in cols])
    return out.getvalue()
