import numpy as np
import pytest

from slaflearn.action_model import GroundDomain


@pytest.fixture
def locked_door() -> GroundDomain:
    return GroundDomain(("locked",), ("unlock_1", "unlock_2", "unlock_3"), "locked-door")


@pytest.fixture
def light_switch() -> GroundDomain:
    return GroundDomain(("E", "sw", "lit"), ("go-W", "go-E", "sw-on"), "light-switch")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240607)


ACCEPTANCE_LINES: list = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion, then gate on it."""

    def record(number: int, name: str, ok: bool, detail: str = "") -> None:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number} {name}: {detail}".rstrip(": ")
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
