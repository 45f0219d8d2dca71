import numpy as np
import pytest

from whitham_ch import ChCurve, KdvCurve


def make_curve(rng, nu_max=2.0, margin=0.15):
    """Random admissible curve with comfortable gaps between invariants."""
    for _ in range(1000):
        nu = float(rng.uniform(0.0, nu_max))
        pts = np.sort(rng.uniform(-nu, 5.0, size=3))
        if pts[0] + nu > margin and float(np.min(np.diff(pts))) > margin:
            return ChCurve(nu, tuple(float(x) for x in pts))
    raise RuntimeError("sampling failed")


def make_kdv(rng, margin=0.1):
    for _ in range(1000):
        b = np.sort(rng.uniform(0.05, 3.0, size=3))
        if b[0] > margin and float(np.min(np.diff(b))) > margin:
            return KdvCurve(tuple(float(x) for x in b))
    raise RuntimeError("sampling failed")


@pytest.fixture
def rng():
    return np.random.default_rng(987654321)


@pytest.fixture
def curve(rng):
    return make_curve(rng)


@pytest.fixture
def kdv(rng):
    return make_kdv(rng)
