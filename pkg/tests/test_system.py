import math
from fractions import Fraction

import numpy as np
import pytest

from cantorlab import (
    address_prefix_to_interval, cylinder_interval, derivative_bounds_on_cylinder,
    make_system, middle_alpha, periodic_point, perturbed, two_ratio,
)
from cantorlab.errors import InvalidSystem, NotCyclicallyAdmissible
from cantorlab.jets import Affine
from cantorlab.symbolic import enumerate_words
from cantorlab.system import bounded_distortion_estimate, cover_words, ratio_for_dimension


def cf_value(digits):
    x = Fraction(0)
    for a in reversed(digits):
        x = 1 / (a + x)
    return float(x)


def test_middle_third_cylinders(third):
    # realized layout: I(0) = [0, 1/3], I(1) = [2/3, 1]; (0,0) is f_00(I(0))
    assert cylinder_interval(third, (0, 0)) == pytest.approx((0, 1 / 9))
    assert cylinder_interval(third, (0, 1)) == pytest.approx((2 / 9, 3 / 9))


def test_gauss_cylinder_continued_fraction(gauss):
    # points of I(1,2,1) are [0; 1, 2, y] with y in I(1); hull ends alternate 1,2 and 2,1 tails
    lo_tail = [1, 1] + [2, 1] * 40
    hi_tail = [1, 2] * 40
    ends = sorted(cf_value([1, 2] + t) for t in (lo_tail, hi_tail))
    assert cylinder_interval(gauss, (1, 2, 1)) == pytest.approx(tuple(ends), abs=1e-15)


def test_derivative_bounds(third, gauss):
    assert derivative_bounds_on_cylinder(third, (0, 1, 0)) == pytest.approx((9, 9))
    assert derivative_bounds_on_cylinder(two_ratio(0.5, 0.25), (0, 1, 0)) == pytest.approx((8, 8))
    lo, hi = derivative_bounds_on_cylinder(gauss, (1, 1, 1))
    a, b = gauss.cylinder_interval((1, 1, 1))
    xs = np.linspace(a, b, 4001)
    # |(g^2)'| on the cylinder, g(x) = 1/x - 1
    g1 = 1 / xs - 1
    dg = (1 / xs**2) * (1 / g1**2)
    assert lo <= dg.min() * (1 + 1e-12) and dg.max() <= hi * (1 + 1e-12)


def test_periodic_points(third, gauss):
    assert periodic_point(third, (0,)) == pytest.approx((0, 3))
    assert periodic_point(third, (1,)) == pytest.approx((1, 3))
    phi = (1 + math.sqrt(5)) / 2
    assert periodic_point(gauss, (1,)) == pytest.approx(((math.sqrt(5) - 1) / 2, -phi**2))
    with pytest.raises(NotCyclicallyAdmissible):
        periodic_point(make_system([0, 1], [(0, 0), (0, 1), (1, 0)], {0: (0, 1), 1: (0, 1)},
                                   {(0, 0): Affine(0, 0.3), (0, 1): Affine(0.6, 0.3), (1, 0): Affine(0.5, 0.2)}), (1, 1))


def test_address_prefix(third):
    interval = address_prefix_to_interval(third, (0, 1) * 8)
    assert interval[0] <= 0.25 <= interval[1]
    assert interval[1] - interval[0] == pytest.approx(3.0**-16)
    assert address_prefix_to_interval(third, (1,)) == pytest.approx(third.base_intervals[1])
    widths = [address_prefix_to_interval(third, (0,) * k) for k in range(1, 6)]
    assert all(w[0] == 0 for w in widths) and widths[-1][1] == pytest.approx(3.0**-5)


def test_invalid_system_overlap():
    with pytest.raises(InvalidSystem):
        make_system([0, 1], [(0, 0), (0, 1), (1, 0), (1, 1)], {0: (0, 1), 1: (0, 1)},
                    {(a, b): Affine(0.1 * b, 0.5) for a in (0, 1) for b in (0, 1)})


def test_cover_and_distortion(third, gauss):
    words = cover_words(third, 1 / 27)
    assert len(words) == 8 and all(third.cylinder_length(w) <= 1 / 27 * (1 + 1e-9) for w in words)
    assert bounded_distortion_estimate(third, 4) == pytest.approx(1.0)
    c = bounded_distortion_estimate(gauss, 4)
    assert 0 < c < 1


def test_perturbed_is_nonaffine(pert04):
    assert not pert04.is_affine
    assert perturbed(middle_alpha(1 / 3), 0.0).cylinder_interval((0, 1, 1)) == pytest.approx(middle_alpha(1 / 3).cylinder_interval((0, 1, 1)))
    assert 2 * ratio_for_dimension(0.4) ** 0.4 == pytest.approx(1)
