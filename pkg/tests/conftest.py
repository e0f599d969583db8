import re

_CRITERIA: dict[int, dict] = {}
_NAME = re.compile(r"test_criterion_(\d+)_(\w+?)(?:\[.*\])?$")


def pytest_runtest_logreport(report):
    match = _NAME.search(report.nodeid)
    if match is None:
        return
    if report.when == "call" or report.outcome != "passed":
        num = int(match.group(1))
        entry = _CRITERIA.setdefault(num, {"title": match.group(2).replace("_", " "), "ok": True})
        entry["ok"] &= report.outcome == "passed"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        entry = _CRITERIA[num]
        status = "PASS" if entry["ok"] else "FAIL"
        terminalreporter.write_line(f"{status}  criterion {num}: {entry['title']}")
