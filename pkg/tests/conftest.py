from collections import defaultdict

import pytest

_outcomes = defaultdict(list)
_titles = {}


def pytest_runtest_logreport(report):
    k = getattr(report, "criterion", None)
    if k is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _outcomes[k].append(report.passed)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        report = outcome.get_result()
        report.criterion = mark.args[0]
        _titles.setdefault(mark.args[0], mark.kwargs.get("title", ""))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_outcomes):
        status = "PASS" if all(_outcomes[k]) else "FAIL"
        terminalreporter.write_line(f"criterion {k:2d} {status}  {_titles[k]}")
