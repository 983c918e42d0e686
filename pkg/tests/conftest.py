import math

import numpy as np
import pytest

from shiftlike import DensityLineSystem, MeasureProfile

E = math.e

ACCEPTANCE_LINES = []


def paper_log_mass(n):
    """Closed-form log mu(f^n(W)) for the built-in example density."""
    if n >= 0:
        return n + math.log(E - 1)
    return 2 * n + math.log(0.5 * (E**2 - 1))


@pytest.fixture(scope="session")
def paper_system():
    return DensityLineSystem.paper_example()


@pytest.fixture(scope="session")
def paper_profile(paper_system):
    return paper_system.profile((-1200, 1200))


@pytest.fixture
def constant_profile():
    return MeasureProfile.constant(0.0, (-5, 5))


def random_profile(rng, lo, hi, step=2.0):
    """Random-walk log masses on [lo, hi]."""
    steps = rng.uniform(-step, step, hi - lo + 1)
    values = np.cumsum(steps)
    values -= values[-lo]
    return MeasureProfile(lo, values)


def record_acceptance(name, ok, detail=""):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f" -- {detail}" if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
