import re

import pytest

# criterion id -> one-line detail, filled by the acceptance tests
DETAILS: dict[str, str] = {}
_OUTCOMES: dict[str, str] = {}
_ID = re.compile(r"test_acceptance\.py::test_(c\d+)_")


@pytest.fixture
def detail():
    def note(cid, text):
        DETAILS[cid] = text

    return note


def pytest_runtest_logreport(report):
    m = _ID.search(report.nodeid)
    if not m:
        return
    cid = m.group(1).upper()
    if report.failed:
        _OUTCOMES[cid] = "FAIL"
    elif report.skipped:
        _OUTCOMES[cid] = "SKIP"
    elif report.when == "call":
        _OUTCOMES[cid] = "PASS"


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_OUTCOMES, key=lambda c: int(c[1:])):
        terminalreporter.write_line(f"{cid:>4} {_OUTCOMES[cid]}  {DETAILS.get(cid, '')}")
