import pytest

_criteria: dict[str, tuple[str, str]] = {}
_outcomes: dict[str, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, title): acceptance criterion covered by the test")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _criteria[item.nodeid] = (str(m.args[0]), m.args[1])


def pytest_runtest_logreport(report):
    if report.nodeid not in _criteria:
        return
    if report.when == "call" or report.failed:
        if _outcomes.get(report.nodeid) != "FAIL":
            _outcomes[report.nodeid] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, (cid, title) in sorted(_criteria.items(), key=lambda kv: int(kv[1][0])):
        outcome = _outcomes.get(nodeid, "NOT RUN")
        terminalreporter.write_line(f"[{outcome}] criterion {cid}: {title}")
