import numpy as np
import pytest

from hamdist.lie import PAULI_X, PAULI_Z

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def sz_sx():
    return [PAULI_Z, PAULI_X]


@pytest.fixture
def report():
    """Record one pass/fail line per acceptance criterion."""

    def _report(criterion, passed, detail=""):
        ACCEPTANCE_LINES.append((criterion, bool(passed), detail))
        return passed

    return _report


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {criterion}  {detail}")
