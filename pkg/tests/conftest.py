import random

import pytest

from klyachko.matlin import J, Matrix

_VERDICTS = []


def record_verdict(line: str):
    """Acceptance tests call this; the lines are echoed in the summary."""
    print(line)
    _VERDICTS.append(line)


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)


@pytest.fixture
def rnd():
    return random.Random(12345)


def random_invertible(rnd, n, p):
    while True:
        m = Matrix([[rnd.randrange(p) for _ in range(n)] for _ in range(n)], p)
        if m.is_invertible():
            return m


def random_alternating(rnd, n, p):
    c = random_invertible(rnd, n, p)
    return c.T @ J(n, p) @ c
