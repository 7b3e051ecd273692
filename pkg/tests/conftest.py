import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

# Acceptance checks (tests/test_acceptance.py) register a line here as they
# run; the terminal summary prints one PASS/FAIL line per criterion so the
# outcome is readable without scrolling through the pytest log.
_ACCEPTANCE_LINES: list[tuple[str, bool, str]] = []


def record_acceptance(name: str, ok: bool, detail: str = "") -> None:
    _ACCEPTANCE_LINES.append((name, bool(ok), detail))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240814)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE_LINES:
        status = "PASS" if ok else "FAIL"
        line = f"{status}  {name}"
        if detail:
            line += f"  ({detail})"
        tr.write_line(line, green=ok, red=not ok)
