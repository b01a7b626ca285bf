import math

import numpy as np
import pytest
from hypothesis import settings

from dovesagnac.fresnel import LOSSLESS_DOVE, MEASURED_DOVE

settings.register_profile("repo", derandomize=True, max_examples=200, deadline=None)
settings.load_profile("repo")

SIX = ("H", "V", "+", "-", "L", "R")


@pytest.fixture
def measured_dove():
    return MEASURED_DOVE


@pytest.fixture
def lossless_dove():
    return LOSSLESS_DOVE


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def quarter_turn_grid(n=9):
    """alpha in {0, pi/16, ..., pi/2}."""
    return [k * math.pi / (2 * (n - 1)) for k in range(n)]


# Acceptance criteria register their outcome here; the summary hook prints
# one line per criterion after the run.
ACCEPTANCE = {}


def record_criterion(key, title, passed, detail=""):
    ACCEPTANCE[key] = (title, bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int("".join(c for c in k if c.isdigit())), k)):
        title, passed, detail = ACCEPTANCE[key]
        mark = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{mark}] criterion {key}: {title}" + (f"  ({detail})" if detail else ""))
