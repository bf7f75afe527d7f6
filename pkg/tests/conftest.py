import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from berconvex import parse_constellation  # noqa: E402

FIXTURES = ("bpsk", "psk:4:gray", "psk:8:gray", "qam:16:gray", "pam:4:gray")
CRITERIA: list[str] = []


@pytest.fixture(scope="session")
def fixtures():
    return {name: parse_constellation(name) for name in FIXTURES}


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for the end-of-run summary and stdout."""

    def record(number: int, ok: bool, detail: str):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        CRITERIA.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA):
            terminalreporter.write_line(line)
