"""Collects acceptance-criterion outcomes and prints one line per criterion."""
import pytest

_results = {}


def pytest_runtest_logreport(report):
    info = dict(report.user_properties).get("acceptance")
    if info is None:
        return
    num, title = info
    detail = "; ".join(v for k, v in report.user_properties if k == "detail")
    prev = _results.get(num)
    failed = report.failed or (prev is not None and prev[1] == "FAIL")
    if report.when == "call" or report.failed:
        _results[num] = (title, "FAIL" if failed else "PASS", detail)


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_setup(item):
    mark = item.get_closest_marker("acceptance")
    if mark is not None:
        item.user_properties.append(("acceptance", tuple(mark.args)))


@pytest.fixture
def detail(request):
    """Attach a short measured-values string to the acceptance summary line."""

    def put(text):
        request.node.user_properties.append(("detail", text))

    return put


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_results):
        title, status, detail = _results[num]
        line = f"criterion {num} {status}: {title}"
        if detail:
            line += f" [{detail}]"
        terminalreporter.write_line(line)
