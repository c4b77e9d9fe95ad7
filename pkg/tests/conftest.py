from __future__ import annotations

import os
from itertools import combinations
from pathlib import Path

import pytest

from incdemon.ego import EgoMinusEgo
from incdemon.graph import Graph

_ACCEPTANCE: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): exit criterion, reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    label = marker.args[0]
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[rep.outcome]
        _ACCEPTANCE[item.nodeid] = (label, status)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, status in sorted(_ACCEPTANCE.values()):
        terminalreporter.write_line(f"{status}  {label}")


def clique_edges(vertices):
    return list(combinations(vertices, 2))


def make_sub(edges=(), vertices=(), ego=-1) -> EgoMinusEgo:
    adj: dict[int, set[int]] = {v: set() for v in vertices}
    for a, b in edges:
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    return EgoMinusEgo(ego, adj)


@pytest.fixture
def two_cliques_bridge() -> Graph:
    return Graph(clique_edges(range(4)) + clique_edges(range(4, 8)) + [(3, 4)])


@pytest.fixture
def congress_path() -> Path:
    path = os.environ.get("INCDEMON_CONGRESS")
    if not path or not Path(path).is_file():
        pytest.skip("set INCDEMON_CONGRESS to the Congress edge-list CSV to run")
    return Path(path)
