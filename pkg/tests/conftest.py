from __future__ import annotations

import random
import warnings
from functools import lru_cache

import pytest

from polarwedge.algebra import MPoly, Q
from polarwedge.cli import parse_germ
from polarwedge.polar import polar_wedge_system

MAIN_GERM = "z^2 - y^3 - x^2*y^2"
CONIC = "z^2 - x^2 - y^2"
CUSP_LINE = "z^2 - x*y^2"
# t -> 1 + t keeps the family inside its uniform range around t = 0
T_FAMILY = "z^2 - y^3 - (1 + t)*x*y^2"
RANDOM_CUBIC_SEED = 6


def random_cubic_germ(seed: int) -> MPoly:
    """z^2 plus a sparse cubic with small integer coefficients."""
    rng = random.Random(seed)
    mons = [(a, b, c) for a in range(4) for b in range(4) for c in range(3) if a + b + c == 3]
    terms = {(0, 0, 2): Q(1)}
    for m in mons:
        if rng.random() < 0.6:
            terms[m] = Q(rng.randint(-3, 3))
    return MPoly(("x", "y", "z"), {e: c for e, c in terms.items() if c != 0})


@lru_cache(maxsize=None)
def system_for(text: str, N: int = 24):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return polar_wedge_system(parse_germ(text), N)


@pytest.fixture(scope="session")
def main_system():
    return system_for(MAIN_GERM)


@pytest.fixture(scope="session")
def conic_system():
    return system_for(CONIC)
