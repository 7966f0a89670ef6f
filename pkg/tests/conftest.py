import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=30)
settings.load_profile("default")

ACCEPTANCE_RESULTS: dict[int, list[tuple[bool, str]]] = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        outcomes = ACCEPTANCE_RESULTS[number]
        ok = all(passed for passed, _ in outcomes)
        details = "; ".join(detail for _, detail in outcomes)
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {details}")
