import pytest

_criteria = []


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(number, title, limit): acceptance criterion with a runtime limit in seconds")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    number, title, limit = mark.args
    _criteria.append((number, title, limit, rep.passed, rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, limit, passed, duration in sorted(_criteria):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(
            f"criterion {number:>2}: {status}  {duration:6.2f}s (limit {limit}s)  {title}")
