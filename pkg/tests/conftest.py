import pytest

from ahiso.counterexample import CounterexampleParams, construct
from ahiso.metric import make_mass_ramp


@pytest.fixture(scope="session")
def counterexample_metric():
    return construct(CounterexampleParams())


# R >= -6 perturbations: Hawking mass rises from m_inner to m_outer
RAMP_ARGS = [
    (0.5, 1.5, 1.5, 4.0),
    (1.0, 1.0, 2.0, 5.0),
    (0.2, 0.6, 0.5, 3.0),
    (1.0, 2.0, 3.0, 6.0),
    (0.05, 0.3, 0.2, 1.0),
]


@pytest.fixture(scope="session")
def ramp_metrics():
    return [make_mass_ramp(*args) for args in RAMP_ARGS]


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
