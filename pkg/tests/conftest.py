import pytest

from sintsums.qfield import make_field, make_place_set
from sintsums.sunits import s_unit_basis

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def context(d, primes=()):
    K = make_field(d)
    S = make_place_set(K, primes)
    return K, S, s_unit_basis(K, S)


@pytest.fixture(scope="session")
def sqrt2():
    return context(2)


@pytest.fixture(scope="session")
def sqrt2_with_2():
    return context(2, [2])
