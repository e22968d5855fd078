import numpy as np
import pytest

from cartan_orbits.gf import field_make


@pytest.fixture
def F3():
    return field_make(3)


@pytest.fixture
def F5():
    return field_make(5)


@pytest.fixture
def F9():
    return field_make(3, 2)


@pytest.fixture
def F25():
    return field_make(5, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = {}


def record_acceptance(number, passed, detail):
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
