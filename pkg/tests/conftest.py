import os

import numpy as np
import pytest

# Sweeps in the test suite run in-process unless the caller asks otherwise.
os.environ.setdefault("MODEFLOW_THREADS", "1")

_CRITERIA: dict[str, tuple[str, str]] = {}


def record(key: str, ok: bool, detail: str) -> None:
    """Store one acceptance line; printed at the end of the session."""
    _CRITERIA[key] = ("PASS" if ok else "FAIL", detail)


@pytest.fixture
def criterion():
    return record


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA, key=lambda k: [int(t) if t.isdigit() else t for t in k.replace(".", " ").split()]):
        status, detail = _CRITERIA[key]
        terminalreporter.write_line(f"{status}  criterion {key}: {detail}")
