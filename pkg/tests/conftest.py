from contextlib import contextmanager

import numpy as np
import pytest

ACCEPTANCE = {}


@contextmanager
def criterion(number: int, description: str):
    """Record the pass/fail of one acceptance criterion for the summary."""
    try:
        yield
    except BaseException:
        ACCEPTANCE[number] = ("FAIL", description)
        print(f"criterion {number}: FAIL  {description}")
        raise
    ACCEPTANCE[number] = ("PASS", description)
    print(f"criterion {number}: PASS  {description}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        status, text = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {status}  {text}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
