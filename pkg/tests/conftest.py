import sys
from pathlib import Path

import pytest

# lets test modules import shared helpers such as ``curves``
sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    status = _CRITERIA.get(number, (title, "PASS"))[1]
    if report.failed:
        status = "FAIL"
    if report.when == "call" or report.failed:
        _CRITERIA[number] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, status = _CRITERIA[number]
        terminalreporter.write_line(f"{status} criterion {number}: {title}")
