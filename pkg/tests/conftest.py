import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from photonwigner import state

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def small_grid():
    return state.KGrid.centered(6, 0.6)


@pytest.fixture(scope="session")
def packet(small_grid):
    return state.gaussian_state(small_grid, (0.2, -0.1, 1.2), 0.6, (1.0, 0.4j))


ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Record one ``PASS``/``FAIL`` line for the acceptance summary."""
    lines = request.config.stash.setdefault(ACCEPTANCE, [])

    def record(criterion, passed, detail=""):
        line = f"{'PASS' if passed else 'FAIL'} criterion {criterion}: {detail}"
        lines.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
