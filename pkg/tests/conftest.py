import numpy as np
import pytest

from aog_explainer.harsanyi import spectrum_from_table
from aog_explainer.lattice import SubsetTable

# the n=2 game indexed (empty, {1}, {2}, {1,2})
GAME2 = (0.0, 1.0, 2.0, 5.0)

# y = x1*x3 + x3*x4*x5 + x4*x6
ADD_MUL = "x1*x3 + x3*x4*x5 + x4*x6"
ADD_MUL_MASKS = {0b000101, 0b011100, 0b101000}

EXT_ADD_MUL = "3*x1 - 2*x2*x3 - x3*x4*x5 + 5*x4*x6"


@pytest.fixture
def game2():
    return spectrum_from_table(SubsetTable.from_array(GAME2))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_spectrum(rng, n):
    return spectrum_from_table(SubsetTable.from_array(rng.standard_normal(1 << n)))


# acceptance results, printed once at the end of the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
