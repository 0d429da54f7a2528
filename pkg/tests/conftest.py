import pytest

from rabivac.model import ModelParams

# (omega0 / g, delta / omega0) of each figure regime.
REGIMES = {
    "fig1": (10.0, 0.0),
    "fig2": (20.0, 0.1),
    "fig3": (50.0, 0.1),
    "fig4a": (10.0, 0.2),
    "fig4b": (10.0, 0.6),
    "fig5": (20.0, 0.5),
}


def regime(name, g=1.0):
    w0, ratio = REGIMES[name]
    return ModelParams.from_detuning(w0 * g, ratio * w0 * g, g)


@pytest.fixture
def fig1():
    return regime("fig1")


@pytest.fixture
def fig2():
    return regime("fig2")


# Lines recorded by test_acceptance, echoed in the terminal summary.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
