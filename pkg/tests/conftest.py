import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from _factories import car_like, table1  # noqa: E402


@pytest.fixture
def table1_ds():
    return table1()


@pytest.fixture(scope="session")
def car_ds():
    return car_like()


_ACCEPTANCE: dict[int, tuple[str, str]] = {}
_INFO: list[str] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.fixture
def info_line():
    return _INFO.append


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    ok = call.excinfo is None
    prev = _ACCEPTANCE.get(number)
    status = "PASS" if ok and (prev is None or prev[1] == "PASS") else "FAIL"
    _ACCEPTANCE[number] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, status = _ACCEPTANCE[number]
        terminalreporter.write_line(f"[{status}] criterion {number}: {title}")
    for line in _INFO:
        terminalreporter.write_line(f"[INFO] {line}")
