import numpy as np
import pytest

from ocoboost.geometry import Ball, Box, Interval, Simplex


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def set_families():
    """The set families the invariant suites run over."""
    return {
        "interval": Interval(-1.0, 1.0),
        "box2d": Box([-1.0, 0.0], [1.0, 2.0]),
        "ball2d": Ball(2, 1.5, center=[0.5, -0.5]),
        "simplex3": Simplex(3),
    }


def sample_near(set_, rng, n, spread=2.0):
    """Points in and around a set, for projection/distance fuzzing."""
    inside = set_.sample(rng, n)
    outside = inside + spread * rng.standard_normal(inside.shape)
    return np.concatenate([inside, outside])
