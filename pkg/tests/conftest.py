import pytest

# filled by test_acceptance.py: (criterion id, title, passed, detail, seconds)
ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for cid, title, passed, detail, seconds in sorted(ACCEPTANCE_LINES):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{status} [{cid:2d}] {title:32s} {seconds:7.2f}s  {detail}")
