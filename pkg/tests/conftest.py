import pytest

from qctl.kripke import KripkeStructure

ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture
def report(request, capsys):
    """Record and print one PASS/FAIL line for an acceptance criterion."""

    def emit(number: int, title: str, ok: bool, detail: str) -> None:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title} ({detail})"
        request.config.stash[ACCEPTANCE_KEY].append((number, line))
        with capsys.disabled():
            print(f"\n{line}")

    return emit


@pytest.fixture
def s0():
    """Two states, q0 labelled r, all four edges."""
    return KripkeStructure.build(
        ["q0", "q1"], [("q0", "q0"), ("q0", "q1"), ("q1", "q0"), ("q1", "q1")], {"q0": ["r"]}, "q0")
