import time

import pytest

_RESULTS: dict[int, tuple[str, str, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_call(item):
    start = time.perf_counter()
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        number, title = marker.args
        status = "FAIL" if outcome.excinfo is not None else "PASS"
        _RESULTS[number] = (title, status, time.perf_counter() - start)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        title, status, secs = _RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {status} [{secs:.2f}s] {title}")
