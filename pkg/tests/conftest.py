import numpy as np
import pytest

from mlslab.models import TorusModel

ACCEPTANCE_LINES: list = []


def record_criterion(number: int, title: str, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append((number, f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {title}: {detail}"))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)


@pytest.fixture
def square():
    return TorusModel()


@pytest.fixture
def skew():
    return TorusModel(np.array([[1.0, 0.3], [0.3, 1.2]]))
