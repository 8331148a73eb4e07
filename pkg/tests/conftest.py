"""Shared fixtures and the per-criterion PASS/FAIL summary."""

import numpy as np
import pytest

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    _CRITERIA.clear()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    num, title = mark.args
    entry = _CRITERIA.setdefault(num, {"title": title, "passed": True, "tests": 0, "failed": []})
    if rep.when == "call":
        entry["tests"] += 1
    if rep.failed:
        entry["passed"] = False
        entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        e = _CRITERIA[num]
        tag = "PASS" if e["passed"] and e["tests"] else "FAIL"
        extra = f"  (failing: {', '.join(e['failed'])})" if e["failed"] else ""
        tr.write_line(f"criterion {num:>2} {tag}: {e['title']}{extra}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
