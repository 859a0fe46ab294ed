import math

import numpy as np
import pytest

from heisenberg_cmc import ModelParams, Point, SphereSpec, profile_height

GRID = [
    SphereSpec(ModelParams(e, s), R)
    for e in (0.5, 1.0, 2.0)
    for s in (0.5, 1.0, 2.0)
    for R in (0.5, 1.0, 2.0)
]


def sphere_point(spec, rng, lo=0.02, hi=0.98, hemisphere=None):
    """Random point on the sphere with radius fraction in (lo, hi)."""
    r = rng.uniform(lo, hi) * spec.R
    th = rng.uniform(0.0, 2.0 * math.pi)
    if hemisphere is None:
        sg = 1.0 if rng.uniform() < 0.5 else -1.0
    else:
        sg = float(hemisphere)
    t = sg * float(profile_height(spec, r))
    return Point(r * math.cos(th), r * math.sin(th), t)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def params():
    return ModelParams(1.0, 1.0)


@pytest.fixture
def spec(params):
    return SphereSpec(params, 1.0)
