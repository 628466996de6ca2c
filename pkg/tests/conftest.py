import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from scalekit import UnitNormFrame

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def pair_frame(theta):
    """The two unit vectors at angles +theta and -theta."""
    c, s = math.cos(theta), math.sin(theta)
    return UnitNormFrame(np.array([[c, c], [s, -s]]))


def angle_frame(angles):
    angles = np.asarray(angles, dtype=float)
    return UnitNormFrame(np.vstack([np.cos(angles), np.sin(angles)]))


@pytest.fixture
def pair():
    return pair_frame


ACCEPTANCE = {}


def record(number, ok, detail):
    """Store and print the outcome line of an acceptance criterion."""
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
