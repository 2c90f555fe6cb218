import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from hypothesis import settings  # noqa: E402

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import CRITERIA

    results = {}
    for rep in terminalreporter.stats.get("passed", []) + terminalreporter.stats.get("failed", []):
        if rep.when != "call" or "test_acceptance.py" not in rep.nodeid:
            continue
        name = rep.nodeid.split("::")[-1]
        results[name] = rep.outcome
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number, test_name, label in CRITERIA:
        outcome = results.get(test_name, "not run")
        mark = "PASS" if outcome == "passed" else "FAIL" if outcome == "failed" else "SKIP"
        terminalreporter.write_line(f"[{mark}] {number:2d}. {label}")
