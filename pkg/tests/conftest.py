import os
import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from finitop.presentation import Presentation, SparsePoint

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def random_plane_points(rng: random.Random, count: int, den: int = 16, spread: int = 16) -> Presentation:
    pts, seen = [], set()
    while len(pts) < count:
        p = SparsePoint.plane(Fraction(rng.randint(-spread, spread), den), Fraction(rng.randint(-spread, spread), den))
        if p not in seen:
            seen.add(p)
            pts.append(p)
    return Presentation(pts, "random plane")


@pytest.fixture
def rng():
    return random.Random(20261016)


# one pass/fail line per acceptance criterion, printed after the run
_acceptance: dict = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    for name, value in report.user_properties:
        if name == "acceptance":
            _acceptance[value] = (report.passed, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), (passed, seconds) in sorted(_acceptance.items()):
        terminalreporter.write_line(f"criterion {number} {'PASS' if passed else 'FAIL'}  {title}  ({seconds:.1f}s)")
