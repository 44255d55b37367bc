import numpy as np
import pytest

from gptthermo.models import quantum_state

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def qubit_34():
    return quantum_state(np.diag([0.75, 0.25]))


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""

    def record(number: int, title: str, passed: bool, detail: str) -> bool:
        ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] AC{number:02d} {title}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
