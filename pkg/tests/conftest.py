import numpy as np
import pytest

_ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def criterion():
    """Record a one-line PASS/FAIL verdict shown in the terminal summary."""

    def record(number, passed, detail):
        _ACCEPTANCE_LINES.append((number, f"{'PASS' if passed else 'FAIL'}  criterion {number:2d}: {detail}"))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
