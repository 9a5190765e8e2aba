import math
import random

import pytest
from hypothesis import given, strategies as st

from regulab.traffic.network import road_speed


def reference_speed(n, c, s):
    # Independent evaluation of the slowdown curve, written out longhand.
    return s * (1.0 / (1.0 + math.e ** (0.25 * (n - c))) + 0.1) / 1.1


def test_at_capacity_sigmoid_is_half():
    assert road_speed(10, 10, 1.0) == pytest.approx(0.6 / 1.1, abs=1e-9)


def test_empty_road_near_free_flow():
    # sigma(-2.5) = 1/(1+e^-2.5) ~ 0.92414
    expected = (1.0 / (1.0 + math.exp(-2.5)) + 0.1) / 1.1
    assert expected == pytest.approx(0.93104, abs=1e-5)
    assert road_speed(0, 10, 1.0) == pytest.approx(expected, abs=1e-12)


def test_heavily_congested_crawls_but_never_stops():
    # sigma(10) ~ 4.5e-5: effectively the crawl floor.
    assert road_speed(50, 10, 1.0) == pytest.approx(0.1 / 1.1, abs=1e-4)
    assert road_speed(50, 10, 1.0) > 0.0


@pytest.mark.parametrize("n,c,s", [(0, 1, 5.0), (7, 3, 2.5), (1000, 10, 1.0)])
def test_matches_reference_curve(n, c, s):
    assert road_speed(n, c, s) == pytest.approx(reference_speed(n, c, s), rel=1e-12)


def test_strict_monotone_decrease_over_random_parameters():
    # Capacities span the scenario's physical range.  (Beyond ~160 cars over
    # capacity the sigmoid term falls under float64 resolution of the 0.1
    # crawl floor, so the curve plateaus within one ulp; up to 3C for C <= 60
    # the decrease is strict.)
    rng = random.Random(7)
    for _ in range(100):
        c = rng.randint(1, 60)
        s = rng.uniform(0.5, 40.0)
        speeds = [road_speed(n, c, s) for n in range(0, 3 * c + 1)]
        assert all(a > b for a, b in zip(speeds, speeds[1:]))


@given(n=st.floats(0, 1e6), c=st.integers(1, 1000), s=st.floats(0.01, 100))
def test_speed_bounds(n, c, s):
    v = road_speed(n, c, s)
    assert 0.0 < v <= s
