import pytest

from covenant_game.model import BENCHMARK, ErrorDensity

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def bench():
    return BENCHMARK


@pytest.fixture
def uniform():
    return ErrorDensity.uniform()


@pytest.fixture
def triangular():
    return ErrorDensity.triangular()


@pytest.fixture
def tabulated():
    # symmetric, bimodal, piecewise linear
    return ErrorDensity.tabulated(
        [(-1.0, 0.9), (-0.5, 0.3), (0.0, 0.5), (0.5, 0.3), (1.0, 0.9)]
    )


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
