import random
from fractions import Fraction

import pytest

from flexbipyramid.complexes import Realization, build_bipyramid, build_subdivided
from flexbipyramid.constructions import flex8_domain

B5_LABELS = ("1", "2", "3", "4", "5", "T", "B")


def random_point(rng, num=30, den=7):
    return tuple(Fraction(rng.randint(-num, num), rng.randint(1, den)) for _ in range(3))


def random_realization(rng, labels=B5_LABELS) -> Realization:
    """Random rational points; generic, so nothing coincides."""
    while True:
        pts = {k: random_point(rng) for k in labels}
        if len(set(pts.values())) == len(pts):
            return Realization(pts)


def regular_bipyramid(n=5) -> Realization:
    # rational points on the unit circle: ((1 - u^2) / (1 + u^2), 2u / (1 + u^2))
    us = [Fraction(0), Fraction(1, 2), Fraction(3, 2), Fraction(-3, 2), Fraction(-1, 2)][:n]
    pts = {}
    for k, u in enumerate(us):
        pts[str(k + 1)] = ((1 - u * u) / (1 + u * u), 2 * u / (1 + u * u), Fraction(0))
    pts["T"] = (Fraction(0), Fraction(0), Fraction(1))
    pts["B"] = (Fraction(0), Fraction(0), Fraction(-1))
    return Realization(pts)


@pytest.fixture
def rng():
    return random.Random(20240521)


@pytest.fixture(scope="session")
def b5():
    return build_bipyramid(5)


@pytest.fixture(scope="session")
def s8():
    return build_subdivided()


@pytest.fixture(scope="session")
def flex_domain():
    return flex8_domain()


# one line per acceptance criterion, printed after the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
