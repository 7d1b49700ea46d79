"""Shared fixtures plus the acceptance-criteria summary section.

Each test in test_acceptance.py covers exactly one acceptance criterion;
the terminal summary repeats their outcomes as one PASS/FAIL line per
criterion so the gate can be read off the bottom of the run.
"""

import numpy as np
import pytest

from soclearn.signals import BoundedMixture, LinearSymmetric, SignalStructure

_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    _ACCEPTANCE.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE:
        word = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{word} {name}")


@pytest.fixture
def linear():
    return SignalStructure(LinearSymmetric())


@pytest.fixture
def bounded():
    return SignalStructure(BoundedMixture(0.5))


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)
