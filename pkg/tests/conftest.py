import os
import re

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_CRITERIA: list[str] = []


def pytest_collection_modifyitems(config, items):
    if os.environ.get("FREEDIV_EXTENDED"):
        return
    skip = pytest.mark.skip(reason="extended case; set FREEDIV_EXTENDED=1 to run")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def record_criterion():
    """Record ``(label, ok)`` checks for one acceptance criterion and print a verdict line."""

    def record(number: int, title: str, checks: list[tuple[str, bool]]) -> list[str]:
        failed = [label for label, ok in checks if not ok]
        line = f"criterion {number}: {'PASS' if not failed else 'FAIL'}  {title}"
        if failed:
            line += "  [failed: " + "; ".join(failed) + "]"
        _CRITERIA.append(line)
        print(line)
        return failed

    return record


def pytest_terminal_summary(terminalreporter):
    lines = list(_CRITERIA)
    for rep in terminalreporter.stats.get("skipped", []):
        m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", rep.nodeid)
        if m:
            lines.append(f"criterion {m.group(1)}: SKIPPED  {m.group(2)} (extended; set FREEDIV_EXTENDED=1)")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
