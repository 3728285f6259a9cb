import functools

import numpy as np
import pytest

from ringpen.cli import table

ACCEPTANCE_LINES = []


@functools.lru_cache(maxsize=None)
def cached_table(number):
    return table(number)


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
