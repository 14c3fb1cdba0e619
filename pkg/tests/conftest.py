import numpy as np
import pytest

from ptlp import DiscreteSignal


def random_signal(rng, m=None, d=1, k=1, max_len=8, grid=None):
    """Random signal; with ``grid`` the positions are drawn from a finite grid."""
    m = m if m is not None else int(rng.integers(1, max_len + 1))
    if grid is None:
        pos = rng.uniform(0, 1, size=(m, d))
    else:
        pos = rng.choice(grid, size=(m, d))
    return DiscreteSignal(pos, rng.normal(size=(m, k)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion."""
    def record(number, text):
        request.node._criterion = (number, text)
    yield record
    info = getattr(request.node, "_criterion", None)
    if info is not None:
        rep = getattr(request.node, "rep_call", None)
        ok = rep is not None and rep.passed
        ACCEPTANCE_LINES.append((info[0], "PASS" if ok else "FAIL", info[1]))


@pytest.hookimpl(hookwrapper=True, tryfirst=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, status, text in sorted(ACCEPTANCE_LINES, key=lambda r: (int(str(r[0]).rstrip("ab")), str(r[0]))):
        terminalreporter.write_line(f"[{status}] criterion {str(number):>3}: {text}")
