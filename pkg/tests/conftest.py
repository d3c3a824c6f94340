import numpy as np
import pytest

from auvms_plan.scenario import load_scenario
from auvms_plan.world import SphereObstacle

# filled by test_acceptance, printed at the end of the session
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture(scope="session")
def multi():
    return load_scenario("paper_multi_obstacle")


@pytest.fixture(scope="session")
def single():
    return load_scenario("paper_single_obstacle")


@pytest.fixture(scope="session")
def empty():
    return load_scenario("paper_no_obstacle")


@pytest.fixture(scope="session")
def blocked(multi):
    """Multi-obstacle scenario plus a sphere sitting on the straight start-goal tip line."""
    scenario, params = multi
    extra = SphereObstacle((2.0, 2.075, 1.75), 0.3)
    return scenario.with_changes(name="blocked", obstacles=scenario.obstacles + (extra,)), params


def random_configs(scenario, n, seed=0):
    rng = np.random.default_rng(seed)
    q = np.empty((n, 8))
    q[:, :3] = rng.uniform(scenario.bounds_min, scenario.bounds_max, (n, 3))
    q[:, 3] = rng.uniform(-np.pi, np.pi, n)
    q[:, 4:7] = rng.uniform(-1.9, 1.9, (n, 3))
    q[:, 7] = rng.uniform(-np.pi, np.pi, n)
    return q
