import math
from functools import lru_cache

import pytest

from isoprod.model_strip import StripConfig
from isoprod.profiles import sphere_profile

FOUR_PI = 4.0 * math.pi


@lru_cache(maxsize=None)
def sphere(m: int, samples: int = 2049):
    return sphere_profile(m, samples)


def s2_config(lam: float = 1.0) -> StripConfig:
    return StripConfig(2, 2, sphere(2), sphere(2), lam)


def s2_closed_form(v):
    return math.sqrt(max(v * (FOUR_PI - v), 0.0))


@pytest.fixture(scope="session")
def s2():
    return sphere(2)


@pytest.fixture(scope="session")
def s3():
    return sphere(3)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
