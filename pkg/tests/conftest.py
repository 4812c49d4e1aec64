import math

import pytest
from hypothesis import HealthCheck, settings

from schottky.config import CirclePair, CircleSystem
from schottky.moebius import OrientedCircle

settings.register_profile(
    "default", deadline=None, max_examples=80, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def one_pair():
    """The pair |z + 2| = 1, |z - 2| = 1 with its canonical map."""
    p = CirclePair.canonical(OrientedCircle(-2, 1), OrientedCircle(2, 1))
    return CircleSystem((p,)).relabeled()


@pytest.fixture
def two_pairs(one_pair):
    q = CirclePair.canonical(OrientedCircle(-2j, 0.5), OrientedCircle(2j, 0.5))
    return CircleSystem(one_pair.pairs + (q,)).relabeled()


def ring_system(k: int, radius: float = 0.3) -> CircleSystem:
    """2k equal circles on a ring of radius 2, antipodes paired."""
    pts = [2.0 * complex(math.cos(math.pi * m / k), math.sin(math.pi * m / k)) for m in range(2 * k)]
    circles = [OrientedCircle(z, radius) for z in pts]
    return CircleSystem(
        tuple(CirclePair.canonical(circles[i], circles[i + k]) for i in range(k))
    ).relabeled()
