import numpy as np
import pytest

from avoidlab.geometry import Box


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_box(rng, lo=0.0, hi=4.0, max_side=2.0) -> Box:
    x0, y0 = rng.uniform(lo, hi, 2)
    w, h = rng.uniform(0.01, max_side, 2)
    return Box.from_bounds(x0, x0 + w, y0, y0 + h)
