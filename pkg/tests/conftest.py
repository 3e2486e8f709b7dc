import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from coinwalk import hadamard_coin  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def hadamard():
    return hadamard_coin()


@pytest.fixture
def rng():
    return np.random.default_rng(20021)


@pytest.fixture
def report():
    def _record(criterion: str, ok: bool, detail: str) -> bool:
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
