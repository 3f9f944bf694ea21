import pytest

_criterion_results: list[tuple[int, str, bool]] = []


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(n, title): marks a test as one acceptance criterion"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        number = marker.args[0]
        title = marker.args[1] if len(marker.args) > 1 else item.name
        _criterion_results.append((number, title, report.passed))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criterion_results:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed in sorted(_criterion_results):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status} - {title}")
