import pytest

ACCEPTANCE_RESULTS = []


@pytest.fixture
def criterion(request):
    """Record a pass/fail line for an acceptance criterion."""

    def record(number, title):
        entry = {"number": number, "title": title, "passed": False, "detail": ""}
        ACCEPTANCE_RESULTS.append(entry)
        return entry

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for e in sorted(ACCEPTANCE_RESULTS, key=lambda e: e["number"]):
        status = "PASS" if e["passed"] else "FAIL"
        line = f"[{status}] {e['number']:2d}. {e['title']}"
        if e["detail"]:
            line += f" ({e['detail']})"
        terminalreporter.write_line(line)
