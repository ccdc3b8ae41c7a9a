import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fsandpile.core import Configuration

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# first running example: a {1,4} configuration, rows bottom-up
FIG_14_ROWS = [[1, 4, 4, 4, 1], [4, 1, 1, 1, 1], [4, 4, 4, 4, 4]]
# second running example: a {0,1,4} configuration, rows bottom-up
FIG_014_ROWS = [[0, 4, 4, 1, 1], [4, 1, 0, 4, 4], [4, 4, 4, 0, 0]]


def rand_config(rng, alphabet, max_w, max_h=None, min_side=1):
    max_h = max_w if max_h is None else max_h
    w = int(rng.integers(min_side, max_w + 1))
    h = int(rng.integers(min_side, max_h + 1))
    return Configuration(rng.choice(sorted(alphabet), size=(h, w)))


def configs(alphabet=(0, 1, 2, 3, 4), max_side=6):
    """Hypothesis strategy for A-simple configurations."""
    alphabet = sorted(alphabet)
    shapes = st.tuples(st.integers(1, max_side), st.integers(1, max_side))
    return shapes.flatmap(
        lambda s: arrays(np.int16, s, elements=st.sampled_from(alphabet)).map(Configuration)
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def fig14():
    return Configuration.from_rows(FIG_14_ROWS)


@pytest.fixture
def fig014():
    return Configuration.from_rows(FIG_014_ROWS)
