"""Shared fixtures: small graphs, the optional real-instance directory, and
the acceptance summary lines printed at the end of a run."""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import pytest

from densub.graph import from_edges
from densub.instances import gen_demo

# Real instance files are optional: tests that need them skip when absent.
# Populate with tools/fetch_instances.py or point DENSUB_DATA elsewhere.
DATA_DIR = Path(os.environ.get("DENSUB_DATA", Path(__file__).resolve().parent.parent / "data"))

_ACCEPTANCE_LINES: list[str] = []


def record_acceptance(num: int, ok: bool, detail: str = "") -> None:
    """Log one pass/fail line per criterion and fail the test on violation."""
    status = "PASS" if ok else "FAIL"
    line = f"[criterion {num}] {status}" + (f": {detail}" if detail else "")
    _ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def record_acceptance_skip(num: int, reason: str) -> None:
    _ACCEPTANCE_LINES.append(f"[criterion {num}] SKIP: {reason}")
    pytest.skip(reason)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def require_data(name: str) -> Path:
    path = DATA_DIR / name
    if not path.exists():
        pytest.skip(
            f"{name} not present under {DATA_DIR}; run tools/fetch_instances.py "
            "on a machine with network access"
        )
    return path


@pytest.fixture
def triangle():
    g, _ = from_edges([0, 1, 2], [1, 2, 0])
    return g


@pytest.fixture
def demo():
    return gen_demo()


@pytest.fixture
def weighted_triangle():
    g, _ = from_edges([0, 1, 2], [1, 2, 0], [2.0, 3.0, 4.0])
    return g


@pytest.fixture
def path4():
    g, _ = from_edges([0, 1, 2], [1, 2, 3])
    return g


def degree_multiset(graph) -> list[int]:
    return sorted(np.diff(graph.offsets).tolist())
