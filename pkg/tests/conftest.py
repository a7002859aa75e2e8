import os

import pytest

VERDICTS: list[str] = []


def pytest_collection_modifyitems(config, items):
    if os.environ.get("GRACE_FIR_FULL_SWEEP") == "1":
        return
    skip = pytest.mark.skip(reason="full sweep is opt-in: set GRACE_FIR_FULL_SWEEP=1")
    for item in items:
        if "fullsweep" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
