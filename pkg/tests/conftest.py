from __future__ import annotations

from pathlib import Path

import pytest

from ftregime.dsl import load_model

DATA = Path(__file__).resolve().parents[1] / "src" / "ftregime" / "data"

_criteria: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


@pytest.fixture(scope="session")
def sbw():
    return load_model(DATA / "sbw.ftm")


@pytest.fixture(scope="session")
def ads():
    return load_model(DATA / "ads.ftm")


@pytest.fixture(scope="session")
def sbw_text():
    return (DATA / "sbw.ftm").read_text(encoding="utf-8")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _criteria.setdefault(number, {"title": title, "ok": True, "tests": 0})
    if report.when == "call":
        entry["tests"] += 1
    if report.failed or (report.when == "call" and report.skipped):
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        e = _criteria[number]
        status = "PASS" if e["ok"] and e["tests"] else "FAIL"
        n = e["tests"]
        terminalreporter.write_line(f"criterion {number}: {status}  {e['title']} ({n} test{'' if n == 1 else 's'})")
