import pytest

from crspectral import RayleighChannel

# standard oracle grid, dB
GRID_DB = (0, 5, 10, 15, 20, 25, 30)
SWEEP_DB = tuple(range(0, 31))


@pytest.fixture(params=GRID_DB, ids=lambda d: f"{d}dB")
def grid_channel(request):
    return RayleighChannel.from_db(request.param)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
