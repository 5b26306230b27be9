import numpy as np
import pytest
from hypothesis import settings

# first calls pay numba compilation, so per-example deadlines are meaningless
settings.register_profile("whmin", deadline=None)
settings.load_profile("whmin")

from whmin.classifier import train_wmin
from whmin.heuristics import train_centroids


@pytest.fixture(scope="session")
def model3():
    """F3 WMIN model with centroids, small enough to train in a couple of seconds."""
    wmin = train_wmin(3, 4000, 0.001, seed=11)
    return wmin.with_centroids(train_centroids(3, seed=12))


@pytest.fixture(scope="session")
def model2():
    wmin = train_wmin(2, 2000, 0.001, seed=21)
    return wmin.with_centroids(train_centroids(2, seed=22))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance_report(request):
    """Record one pass/fail line per acceptance criterion; shown in the terminal summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def report(number, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {detail}"
        lines.append((number, line))
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
