import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria = pytest.StashKey[list]()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config.stash[_criteria] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    details = " ".join(f"{k}={v}" for k, v in item.user_properties)
    item.config.stash[_criteria].append((number, title, report.passed, details))


def pytest_terminal_summary(terminalreporter, config):
    rows = sorted(config.stash[_criteria])
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, details in rows:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2} {status}  {title}  {details}".rstrip())
