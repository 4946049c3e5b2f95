import math
import os

import numpy as np
import pytest
from hypothesis import settings

from restarted_aa.iterations import SymmetricSystem

settings.register_profile("default", max_examples=int(os.environ.get("HYPOTHESIS_EXAMPLES", 200)), deadline=None)
settings.load_profile("default")


def rotation(theta: float) -> np.ndarray:
    return np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])


def orthogonal(rng, n):
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))


def system_2x2(m1, m2, theta=0.3, b=None):
    V = rotation(theta)
    return SymmetricSystem.from_eigen([m1, m2], V, b), V


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# Acceptance criteria report one line each at the end of the run.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
