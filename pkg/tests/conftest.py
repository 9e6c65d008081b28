from __future__ import annotations

from collections import defaultdict

import pytest

_criteria: dict[int, dict] = defaultdict(lambda: {"summary": "", "outcomes": [], "details": []})


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, summary): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        number, summary = marker.args
        entry = _criteria[number]
        entry["summary"] = summary
        entry["outcomes"].append(rep.passed)
        entry["details"].extend(v for k, v in item.user_properties if k == "detail")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        verdict = "PASS" if entry["outcomes"] and all(entry["outcomes"]) else "FAIL"
        detail = "; ".join(entry["details"])
        line = f"AC{number} {verdict}  {entry['summary']}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
