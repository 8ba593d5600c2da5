from __future__ import annotations

import random
from fractions import Fraction

import pytest

from pandorabox import InvariantError
from pandorabox.piecewise import PiecewiseLinear

from helpers import rand_dist

F = Fraction


def test_evaluation_and_extension():
    f = PiecewiseLinear((F(0), F(2)), (F(1), F(2)), F(1, 2))
    assert f(F(0)) == 1
    assert f(F(1)) == F(3, 2)
    assert f(F(2)) == 2
    assert f(F(4)) == 3  # right ray, slope 1/2
    with pytest.raises(InvariantError):
        f(F(-1))


def test_expectation_of_max_matches_pointwise_average():
    rng = random.Random(5)
    for _ in range(50):
        dist = rand_dist(rng)
        f = PiecewiseLinear((F(0), F(3), F(5)), (F(2), F(4), F(9, 2)), F(1))
        g = f.expectation_of_max(dist)
        for x in (F(0), F(1, 3), F(2), F(3), F(4), F(7), F(11, 2)):
            expected = sum(p * f(max(x, v)) for v, p in dist.atoms)
            assert g(x) == expected


def test_smallest_fixed_point_interior():
    # f(x) = 2 - x/2 crosses the identity at 4/3
    f = PiecewiseLinear((F(0), F(4)), (F(2), F(0)), F(0))
    assert f.smallest_fixed_point() == F(4, 3)


def test_smallest_fixed_point_on_ray():
    # within knots f stays above identity; crossing on the right ray
    f = PiecewiseLinear((F(0), F(1)), (F(2), F(5, 2)), F(1, 2))
    # ray: f(x) = 5/2 + (x-1)/2; f(x) = x at x = 4
    assert f.smallest_fixed_point() == 4


def test_smallest_fixed_point_negative():
    f = PiecewiseLinear((F(0),), (F(-3),), F(0))
    assert f.smallest_fixed_point() == -3


def test_smallest_fixed_point_at_touch():
    # touches the identity exactly at a knot
    f = PiecewiseLinear((F(0), F(2)), (F(1), F(2)), F(1))
    assert f.smallest_fixed_point() == 2


def test_max_with_identity_truncates():
    f = PiecewiseLinear((F(0), F(4)), (F(2), F(0)), F(0))
    h = f.max_with_identity()
    assert h(F(0)) == 2
    assert h(F(1)) == F(3, 2)
    assert h(F(4, 3)) == F(4, 3)
    assert h(F(10)) == 10
    assert h.right_slope == 1


def test_max_with_identity_degenerate():
    f = PiecewiseLinear((F(0),), (F(-1),), F(0))
    h = f.max_with_identity()
    assert h(F(0)) == 0 and h(F(5)) == 5
