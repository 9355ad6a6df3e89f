import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from genpoincare import operators  # noqa: E402

ACCEPTANCE_LINES = []


@pytest.fixture
def sym_grad():
    return operators.symmetric_gradient_2d()


@pytest.fixture
def grad2():
    return operators.gradient(2)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
