import math

import pytest

from xenon_xpm.config import build_system, load_config
from xenon_xpm.perturbation import make_scenario

TWO_PI = 2 * math.pi

# criterion number -> (passed, detail), filled by test_acceptance
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def default_config():
    return load_config()


@pytest.fixture(scope="session")
def default_system(default_config):
    return build_system(default_config)


@pytest.fixture
def scenario_at(default_system):
    def make(delta_over_2pi, small_over_2pi=10e6, system=None):
        return make_scenario(system or default_system, TWO_PI * delta_over_2pi,
                             TWO_PI * small_over_2pi)
    return make


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int("".join(filter(str.isdigit, k))), k)):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {detail}")
