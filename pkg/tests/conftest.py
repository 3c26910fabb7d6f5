import pytest

from dampwave.diagnostics import MultiplierParams
from dampwave.geometry import Bump, DampingProfile, Grid2D, InitialData
from dampwave.solver import run

BASE_U1 = (Bump((0.0, 0.0), 2.0, 1.0),)
DIPOLE_U1 = (Bump((1.0, 0.0), 1.0, 1.0), Bump((-1.0, 0.0), 1.0, -1.0))

_CRITERIA = {}


def simulate(X, n, kind, u1=BASE_U1, T=100.0, sample_every=4, eps0=1.0):
    grid = Grid2D(X, n)
    data = InitialData.from_bumps(grid, [], u1, 2.0)
    a = DampingProfile(kind, eps0, 4.0, 1.0).sample(grid)
    params = MultiplierParams(eps0 if kind != "zero" else 1.0, 4.0, 4.0)
    res = run(data, a, T, sample_every=sample_every, params=params)
    return data, a, params, res


@pytest.fixture(scope="session")
def baseline():
    return simulate(110.0, 881, "localized")


@pytest.fixture(scope="session")
def baseline_refined():
    return simulate(110.0, 1761, "localized", sample_every=8)


@pytest.fixture(scope="session")
def matsumura():
    return simulate(110.0, 881, "constant")


@pytest.fixture(scope="session")
def freewave():
    return simulate(130.0, 1041, "zero")


@pytest.fixture(scope="session")
def freewave_zero_mean():
    return simulate(130.0, 1041, "zero", u1=DIPOLE_U1)


@pytest.fixture(scope="session")
def criterion():
    """Record one pass/fail line per acceptance criterion for the terminal summary."""
    def record(number, ok, detail):
        _CRITERIA[number] = (bool(ok), detail)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        ok, detail = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
