import csv
import io
import json

import pytest

from policysearch.cli import EXIT_BOTTOM, EXIT_INPUT, EXIT_LIMIT, EXIT_SOLVED, main

from conftest import FIXTURES

FIG1 = str(FIXTURES / "fig1.fond.json")
FIG2 = str(FIXTURES / "fig2.fond.json")
PACKAGES = [str(FIXTURES / "packages" / "domain.pddl"), str(FIXTURES / "packages" / "p01.pddl")]


@pytest.fixture
def dead_task(tmp_path):
    path = tmp_path / "dead.json"
    path.write_text(json.dumps({
        "states": ["i", "x", "g"], "init": "i", "goals": ["g"],
        "actions": [{"label": "go", "from": "i", "outcomes": ["x"]}],
    }))
    return str(path)


def test_solve_writes_policy(capsys):
    assert main(["solve", FIG1]) == EXIT_SOLVED
    out, err = capsys.readouterr()
    doc = json.loads(out)
    assert doc["kind"] == "state" and len(doc["mappings"]) == 5
    assert err.startswith("solved |policy|=5")


def test_solve_pddl_with_compression(tmp_path, capsys):
    out_path = tmp_path / "tau.json"
    assert main(["solve", *PACKAGES, "--compress", "on", "--compressed-output", str(out_path)]) == EXIT_SOLVED
    assert "solved |policy|=4" in capsys.readouterr().err
    assert json.loads(out_path.read_text())["kind"] == "partial"


def test_unsolvable_exit_code(dead_task, capsys):
    assert main(["solve", dead_task]) == EXIT_BOTTOM
    assert "no solution" in capsys.readouterr().err


def test_policy_limit_exit_code(capsys):
    assert main(["solve", FIG1, "--max-policies", "1"]) == EXIT_LIMIT
    assert "policy-limit" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["solve", "missing.json"],
    ["solve", FIG1, "--pruning", "nonsense"],
    ["solve", FIG1, "--concretizer", "maybe"],
    ["bench"],
])
def test_input_errors(argv, capsys):
    assert main(argv) == EXIT_INPUT


def test_malformed_task(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"states": ["a"], "init": "zzz", "goals": [], "actions": []}')
    assert main(["solve", str(bad)]) == EXIT_INPUT


def test_expansion_order_script_uses_concretizer(tmp_path, capsys):
    order = tmp_path / "order.txt"
    order.write_text("s_A s_B s_D s_C s_E\n")
    stats = tmp_path / "stats.csv"
    argv = ["solve", FIG2, "--pruning", "domain-frontier", "--expansion-order", str(order), "--stats", str(stats)]
    assert main(argv) == EXIT_SOLVED
    assert "solutions_from_concretizer=1" in capsys.readouterr().err
    row = next(csv.DictReader(io.StringIO(stats.read_text())))
    assert row["outcome"] == "solved" and row["time_s"] != ""


def test_unknown_state_in_expansion_order(tmp_path, capsys):
    order = tmp_path / "order.txt"
    order.write_text("s_A nowhere\n")
    assert main(["solve", FIG2, "--expansion-order", str(order)]) == EXIT_INPUT


def test_validate_round_trip(tmp_path, capsys):
    policy = tmp_path / "pi.json"
    assert main(["solve", FIG1, "-o", str(policy)]) == EXIT_SOLVED
    assert main(["validate", FIG1, str(policy)]) == 0
    assert capsys.readouterr().out.strip().endswith("ok")
    doc = json.loads(policy.read_text())
    doc["mappings"] = [m for m in doc["mappings"] if m["condition"]["state"] != "s_E"]
    policy.write_text(json.dumps(doc))
    assert main(["validate", FIG1, str(policy)]) == 1
    assert "goal-closed: s_E" in capsys.readouterr().out


def test_compress_then_validate(tmp_path, capsys):
    policy, tau = tmp_path / "pi.json", tmp_path / "tau.json"
    assert main(["solve", *PACKAGES, "-o", str(policy)]) == EXIT_SOLVED
    assert main(["compress", *PACKAGES, str(policy), "-o", str(tau)]) == 0
    assert json.loads(tau.read_text())["kind"] == "partial"
    assert main(["validate", *PACKAGES, str(tau)]) == 0
    assert main(["compress", *PACKAGES, str(tau)]) == EXIT_INPUT


def test_bench_micro_is_deterministic(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("PLANNER_SEED", "3")
    outputs = []
    for i in range(2):
        out, summary = tmp_path / f"r{i}.csv", tmp_path / f"s{i}.csv"
        assert main(["bench", "--micro", "15", "--configs", "identity,frontier", "-o", str(out),
                     "--summary", str(summary)]) == 0
        outputs.append((out.read_bytes(), summary.read_bytes()))
    assert outputs[0] == outputs[1]
    rows = list(csv.DictReader(io.StringIO(outputs[0][0].decode())))
    assert len(rows) == 30 and all(r["time_s"] == "" for r in rows)


def test_bench_rejects_unknown_config(capsys):
    assert main(["bench", "--micro", "2", "--configs", "identity,bogus"]) == EXIT_INPUT


def test_symmetries_report(capsys):
    assert main(["symmetries", *PACKAGES]) == 0
    out = capsys.readouterr().out
    assert out.startswith("generators: 1")
    assert "reachable states: 9" in out
