import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def write(tmp_path):
    """Write lines to a file under tmp_path and return its path."""

    def _write(name, lines, newline="\n"):
        path = tmp_path / name
        path.write_bytes("".join(line + newline for line in lines).encode("utf-8"))
        return path

    return _write


_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion reported in the summary")


def pytest_runtest_logreport(report):
    # keep the worst outcome across setup/call/teardown
    name = getattr(report, "criterion", None)
    if name is None:
        return
    if report.failed:
        _criteria[name] = "FAIL"
    elif report.when == "call":
        _criteria.setdefault(name, "PASS")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in _criteria.items():
        terminalreporter.write_line(f"{status}  {name}")
