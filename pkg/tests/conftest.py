import numpy as np
import pytest

from sparse_ar1 import Ar1Params, TimeGrid

_acceptance_results = []


def random_params(rng, rho_max=0.95, sigma_range=(0.1, 10.0)):
    rho = rng.uniform(-rho_max, rho_max)
    sigma = rng.uniform(*sigma_range)
    return Ar1Params(rho, sigma)


def random_grid(rng, m, max_gap=64, start_range=(-1000, 1000)):
    start = rng.integers(*start_range)
    gaps = rng.integers(1, max_gap + 1, size=m - 1)
    return TimeGrid(start + np.concatenate([[0], np.cumsum(gaps)]))


def random_disjoint_grids(rng, m, k, max_gap=8):
    """Two disjoint sorted grids of sizes m (observed) and k (prediction)."""
    pool = random_grid(rng, m + k, max_gap=max_gap).times
    chosen = rng.permutation(m + k)
    return TimeGrid(np.sort(pool[chosen[:m]])), TimeGrid(np.sort(pool[chosen[m:]]))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    passed = call.excinfo is None
    _acceptance_results.append((number, title, passed))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed in sorted(_acceptance_results):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"AC{number:>2} {status}  {title}")
