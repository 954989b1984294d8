import math

import pytest
from hypothesis import HealthCheck, settings

from biosc.model import DEFAULT_GRID, ModelParams

settings.register_profile("biosc", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("biosc")

SQRT_PI = math.sqrt(math.pi)

# a = pi/4, c = 1: b = 0 is the PT-symmetric member, b = sqrt(pi)/2 the other one
FIG5A = ModelParams(eps=-1.0, lam=SQRT_PI / 2, a=math.pi / 4, b=0.0, c=1.0)
FIG5B = ModelParams(eps=-1.0, lam=math.sqrt(3 * math.pi) / 4, a=math.pi / 4, b=SQRT_PI / 2, c=1.0)


def family(eps, b=0.0):
    """The a = pi/4, c = 1 pattern at another eps (lam fixed by the invariant)."""
    return ModelParams.from_abc(eps, math.pi / 4, b, 1.0)


@pytest.fixture
def fig5a():
    return FIG5A


@pytest.fixture
def fig5b():
    return FIG5B


@pytest.fixture
def grid():
    return DEFAULT_GRID


# one line per acceptance criterion, shown at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
