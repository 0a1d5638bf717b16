from __future__ import annotations

import sys
from pathlib import Path

import pytest

from polyclp.linear import parse_constraints
from polyclp.poly import Polyhedron, var_names

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"

sys.path.insert(0, str(Path(__file__).resolve().parent))


def poly(text: str, n: int = 1) -> Polyhedron:
    """Polyhedron over A, B, ... from constraint text."""
    return Polyhedron.make(n, parse_constraints(text, var_names(n)))


@pytest.fixture
def corpus() -> Path:
    return CORPUS


# One line per acceptance criterion, shown at the end of the run.
ACCEPTANCE: dict[int, str] = {}


def record(n: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    ACCEPTANCE[n] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
