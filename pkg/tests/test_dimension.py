import math

import pytest

from cantorlab import box_dimension_estimate, mass_distribution_certify, pressure_dimension, two_ratio
from cantorlab.dimension import bracket_sequence, cylinder_tree
from cantorlab.errors import DegenerateScales, NestingViolated

from conftest import LOG23

# high-precision literature value for the continued-fraction set with digits {1, 2}
E12 = 0.5312805062772051


@pytest.mark.parametrize("depth", [1, 2, 4, 6])
def test_affine_exact(third, depth):
    b = pressure_dimension(third, depth)
    assert b.d_lower == pytest.approx(LOG23, abs=1e-9) and b.d_upper == pytest.approx(LOG23, abs=1e-9)
    t = pressure_dimension(two_ratio(0.5, 0.25), depth)
    golden = -math.log2((math.sqrt(5) - 1) / 2)
    assert t.d_lower == pytest.approx(golden, abs=1e-9) and t.d_upper == pytest.approx(golden, abs=1e-9)


def test_gauss_brackets_nest(gauss):
    seq = bracket_sequence(gauss, [2, 4, 6])
    for outer, inner in zip(seq, seq[1:]):
        assert outer.contains(inner)
    assert all(b.d_lower < E12 < b.d_upper for b in seq)


def test_box_estimate():
    slope, res = box_dimension_estimate([(3.0**-k, 2**k) for k in range(1, 7)])
    assert slope == pytest.approx(LOG23, abs=1e-12) and res < 1e-12
    slope, _ = box_dimension_estimate([(2.0**-k, 2**k) for k in range(1, 7)])
    assert slope == pytest.approx(1.0)
    with pytest.raises(DegenerateScales):
        box_dimension_estimate([(0.1, 3), (0.1, 4), (0.01, 30)])


def test_mass_distribution(third):
    tree = cylinder_tree(third, 5)
    assert mass_distribution_certify(tree, LOG23).certified
    cert = mass_distribution_certify(tree, 0.7)
    assert not cert.certified
    level, _, ratio_sum = cert.violation
    # first parent family fails: 2·(1/3)^0.7
    assert level == 0 and ratio_sum == pytest.approx(2 * 3.0**-0.7)


def test_mass_distribution_nesting():
    with pytest.raises(NestingViolated):
        mass_distribution_certify([[(0, 1)], [(0.5, 1.5)]], 0.5)
