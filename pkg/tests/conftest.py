import sys

import numpy as np
import pytest

from beamharvest import SystemParams
from beamharvest.analytic import SeriesWorkspace


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance-gate verdict lines after capture ends."""
    mod = sys.modules.get("test_acceptance")
    if mod is not None and getattr(mod, "RESULTS", None):
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture
def default_params():
    return SystemParams()


@pytest.fixture(scope="session")
def ws():
    return SeriesWorkspace()


@pytest.fixture(scope="session")
def top_sum_sampler():
    """Brute-force sampler of the top-m partial sum of iid unit exponentials."""
    def draw(total, m, n, seed):
        rng = np.random.default_rng(seed)
        a = rng.exponential(size=(n, total))
        a.sort(axis=1)
        return a[:, total - m:].sum(axis=1)
    return draw
