from __future__ import annotations

import shlex
import sys
from pathlib import Path

import pytest

from pcbverify.circuit import Circuit, make_component
from pcbverify.data import data_root, load_bundle, load_kg, shipped_task_ids

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def kg():
    return load_kg()


@pytest.fixture(scope="session")
def bundles():
    return {i: load_bundle(i) for i in shipped_task_ids()}


@pytest.fixture(scope="session")
def corpus_root() -> Path:
    return data_root()


@pytest.fixture
def stub_cmd():
    """Command prefix that runs the scripted generator with this interpreter."""
    def build(*args: str) -> str:
        return shlex.join([sys.executable, "-m", "pcbverify.stub", *args])
    return build


def two_pin(ref: str, part_type: str, a: str | None, b: str | None, value: str | None = None) -> Circuit:
    """A lone two-terminal part; handy for composing tiny circuits."""
    comp = make_component(ref, part_type, [(1, "1"), (2, "2")], value)
    bindings = {(ref, 1): a, (ref, 2): b}
    return Circuit((comp,)).with_bindings({k: v for k, v in bindings.items() if v is not None})


# -- acceptance summary: one line per criterion at the end of the run --------------

_acceptance: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n, title): numbered acceptance criterion")


def pytest_runtest_logreport(report):
    marker = dict(report.user_properties).get("acceptance")
    if marker is None:
        return
    n, title = marker
    row = _acceptance.setdefault(n, {"title": title, "ok": True, "detail": ""})
    if report.failed or (report.when == "call" and report.skipped):
        row["ok"] = False
    detail = dict(report.user_properties).get("detail")
    if detail:
        row["detail"] = detail


@pytest.fixture(autouse=True)
def _acceptance_tag(request):
    m = request.node.get_closest_marker("acceptance")
    if m is not None:
        request.node.user_properties.append(("acceptance", tuple(m.args)))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_acceptance):
        row = _acceptance[n]
        line = f"[{'PASS' if row['ok'] else 'FAIL'}] {n:2d}. {row['title']}"
        if row["detail"]:
            line += f"  ({row['detail']})"
        terminalreporter.write_line(line)
