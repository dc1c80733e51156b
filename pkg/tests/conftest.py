import random
from functools import lru_cache

import pytest

from src.services.configuration.arrangement import LineArrangement
from src.services.configuration.families import FamilyTag, realize
from src.services.geometry.projective import ProjLine, ProjPoint


@lru_cache(maxsize=None)
def _realized(family: FamilyTag, d: int, seed: int) -> LineArrangement:
    return realize(family, d, seed)


@pytest.fixture
def realized():
    """realized(family, d, seed=1): memoised family realization."""

    def make(family: FamilyTag, d: int, seed: int = 1) -> LineArrangement:
        return _realized(family, d, seed)

    return make


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def frame_points():
    """Five points, no three collinear."""
    return [
        ProjPoint.of(1, 0, 0),
        ProjPoint.of(0, 1, 0),
        ProjPoint.of(0, 0, 1),
        ProjPoint.of(1, 1, 1),
        ProjPoint.of(1, 2, 3),
    ]


@pytest.fixture
def triangle():
    return LineArrangement((ProjLine.of(1, 0, 0), ProjLine.of(0, 1, 0), ProjLine.of(0, 0, 1)))
