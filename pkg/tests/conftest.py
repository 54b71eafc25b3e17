from __future__ import annotations

import sys
from pathlib import Path

import pytest

from dkb.dkbtext import parse_dkb

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"

sys.path.insert(0, str(Path(__file__).parent))

DEPT = (DATA / "dept.dkb").read_text()
NIXON = (DATA / "nixon.dkb").read_text()
SUPERVISOR = (DATA / "supervisor.dkb").read_text()
INCONSISTENT = (DATA / "inconsistent.dkb").read_text()


@pytest.fixture
def dept():
    return parse_dkb(DEPT)


@pytest.fixture
def nixon():
    return parse_dkb(NIXON)


@pytest.fixture
def supervisor():
    return parse_dkb(SUPERVISOR)


@pytest.fixture
def inconsistent():
    return parse_dkb(INCONSISTENT)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
