import pytest

_LINES = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when != "call" and not (report.when == "setup" and report.failed):
        return
    props = dict(item.user_properties)
    if report.passed:
        verdict = "PASS"
    elif hasattr(report, "wasxfail"):
        verdict = "FAIL (known, see notes)"
    else:
        verdict = "FAIL"
    _LINES.append(f"{verdict:<24} [{marker.args[0]}] {props.get('criterion', item.name)} | {props.get('observed', '')}")


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in _LINES:
        terminalreporter.write_line(line)
