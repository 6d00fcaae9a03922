import pytest

_criteria: dict[int, tuple[str, str, float]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    status = "PASS" if report.passed else "FAIL"
    # a criterion split over several tests fails if any part fails
    previous = _criteria.get(number)
    if previous and previous[1] == "FAIL":
        status = "FAIL"
    elapsed = report.duration + (previous[2] if previous else 0.0)
    _criteria[number] = (title, status, elapsed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, status, elapsed = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {status}  {title}  ({elapsed:.2f}s)")
