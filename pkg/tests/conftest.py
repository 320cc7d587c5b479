import random

import pytest

from config import settings
from src.algebra.scalars import RingContext
from src.logic.annulus_trace import build_annulus
from src.logic.braid_reduction import SkeinConstants


@pytest.fixture
def rng():
    return random.Random(settings.RANDOM_SEED)


@pytest.fixture
def ring3():
    return RingContext(3)


@pytest.fixture
def skein3(ring3):
    return SkeinConstants.default(ring3)


@pytest.fixture
def annulus2():
    return build_annulus(2)


@pytest.fixture
def annulus3():
    return build_annulus(3)
