import numpy as np
import pytest

from indicialflow.model_zoo import random_pencil
from indicialflow.pencil import SelfAdjointPencil


def suite_shape(seed: int) -> tuple[int, int]:
    """(dim, mu) for suite pencil number ``seed``: dim <= 5, mu <= 3."""
    return 1 + seed % 5, 1 + (seed // 5) % 3


def suite_pencil(seed: int) -> SelfAdjointPencil:
    return random_pencil(*suite_shape(seed), seed)


def scalar(*c) -> SelfAdjointPencil:
    """Scalar pencil with coefficients c_0, c_1, ..."""
    return SelfAdjointPencil([np.array([[x]], dtype=complex) for x in c])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import CRITERIA
    except ImportError:
        return
    outcome = {}
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::" not in nodeid or getattr(rep, "when", "call") not in ("call", "setup"):
                continue
            name = nodeid.split("::")[-1].split("[")[0]
            if key != "passed" or name not in outcome:
                outcome[name] = "PASS" if key == "passed" else "FAIL"
    if not outcome:
        return
    terminalreporter.section("acceptance criteria")
    for number, (name, label) in enumerate(CRITERIA, start=1):
        status = outcome.get(name, "NOT RUN")
        terminalreporter.write_line(f"[{status}] criterion {number:2d}: {label}")
