from pathlib import Path

import pytest

from happycw.cwexpr import parse_expr
from happycw.graph import parse_instance
from happycw.interval import parse_intervals

FIXTURES = Path(__file__).parent / "fixtures"

_criteria: dict[int, bool] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number n")


def pytest_runtest_logreport(report):
    num = getattr(report, "criterion", None)
    if num is None:
        return
    if report.when == "call" or report.failed or report.skipped:
        ok = report.passed and report.when == "call"
        _criteria[num] = _criteria.get(num, True) and ok


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
    for num in sorted(_criteria):
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if _criteria[num] else 'FAIL'}")


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text()


@pytest.fixture
def p3():
    return parse_instance(fixture_text("p3.happy"))


@pytest.fixture
def p3_expr():
    return parse_expr(fixture_text("p3.cwx"))


@pytest.fixture
def p3_intervals():
    return parse_intervals(fixture_text("p3.intervals"))
