from pathlib import Path

import pytest

from policysearch.explicit import parse_explicit

FIXTURES = Path(__file__).parent / "fixtures"


def load_fixture(name: str):
    path = FIXTURES / f"{name}.fond.json"
    return parse_explicit(path.read_text(), name=name)


class Named:
    """Attribute access to a task's states and actions by their names."""

    def __init__(self, task):
        self.task = task

    def __getattr__(self, name):
        if name.startswith("s_"):
            return self.task.named_state(name)
        return self.task.action_id(name)

    def policy(self, pairs):
        from policysearch.policy import Policy

        return Policy.from_mapping(self.task, {getattr(self, s): getattr(self, a) for s, a in pairs})

    def states(self, *names):
        return [getattr(self, n) for n in names]


@pytest.fixture
def fig1():
    return load_fixture("fig1")


@pytest.fixture
def fig2():
    return load_fixture("fig2")


@pytest.fixture
def fig3():
    return load_fixture("fig3")


@pytest.fixture
def n1(fig1):
    return Named(fig1)


@pytest.fixture
def n2(fig2):
    return Named(fig2)


@pytest.fixture
def n3(fig3):
    return Named(fig3)


ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
