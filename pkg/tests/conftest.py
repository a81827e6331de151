import random

import pytest
from hypothesis import settings

from mfhrr.poly import Poly, Ring

settings.register_profile("fixed", derandomize=True, deadline=None, max_examples=200)
settings.load_profile("fixed")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_poly(rng: random.Random, ring: Ring, max_deg: int = 3, terms: int = 4,
                coeffs=(-3, 3), allow_fractions: bool = False) -> Poly:
    out = {}
    for _ in range(rng.randint(1, terms)):
        exps = [0] * ring.nvars
        for _ in range(rng.randint(0, max_deg)):
            exps[rng.randrange(ring.nvars)] += 1
        c = rng.randint(*coeffs)
        if allow_fractions and rng.random() < 0.3:
            from fractions import Fraction
            c = Fraction(c, rng.randint(1, 4))
        out[tuple(exps)] = out.get(tuple(exps), 0) + c
    return Poly(ring, out)


@pytest.fixture
def rng():
    return random.Random(20240611)
