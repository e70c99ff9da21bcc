import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def poisson_series_cf(y, rate=1.0, terms=30):
    """CF of a Poisson(rate) variable summed term by term."""
    total = 0j
    p = math.exp(-rate)
    for n in range(terms):
        total += p * complex(math.cos(y * n), math.sin(y * n))
        p *= rate / (n + 1)
    return total


# acceptance criteria record "PASS/FAIL" lines here; they are echoed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
