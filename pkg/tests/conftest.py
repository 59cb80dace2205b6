import pytest

from orderbook_lab import _backend
from orderbook_lab.core import RngStream


@pytest.fixture
def rng():
    return RngStream(12345)


@pytest.fixture(params=_backend.available())
def backend(request):
    with _backend.use(request.param):
        yield request.param



def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance PASS/FAIL lines even when output is captured."""
    lines = []
    for reports in terminalreporter.stats.values():
        for rep in reports:
            if getattr(rep, "when", None) != "call" or "test_acceptance" not in rep.nodeid:
                continue
            lines += [ln for ln in rep.capstdout.splitlines() if ln.startswith(("PASS ", "FAIL "))]
    if lines:
        terminalreporter.section("acceptance criteria")
        for ln in sorted(lines, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(ln)
