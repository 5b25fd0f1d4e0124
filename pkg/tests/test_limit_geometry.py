import math

import mpmath
import numpy as np
import pytest

from cantorlab import check_affine_relation, eigenvalue_ratio_report, h_prime_one_profile, limit_geometry, middle_alpha, perturbed, two_ratio
from cantorlab.errors import DepthExceedsTail, TailMismatch
from cantorlab.limit_geometry import c1_distance, convergents, equispaced_grid, residual_sequence
from cantorlab.symbolic import greedy_tail

GRID = 101


def test_affine_identity(third, third_n):
    for system, tail in ((third, (1, 0, 1, 1, 0)), (third_n, (0, 0, 1, 0)), (two_ratio(0.4, 0.2), (1, 1, 0, 1, 0, 1))):
        for depth in (1, 2, len(tail) - 1):
            k = limit_geometry(system, tail, depth)
            x = equispaced_grid(system, tail[-1], GRID)
            assert np.max(np.abs(k.value(x) - x)) < 1e-12
            assert np.max(np.abs(k.jet(x).d1 - 1)) < 1e-12


def test_zero_perturbation_identity(third):
    system = perturbed(third, 0.0)
    k = limit_geometry(system, (0, 1, 1, 0, 1), 4)
    x = equispaced_grid(system, 1, GRID)
    assert np.max(np.abs(k.value(x) - x)) < 1e-12


def test_gauss_golden_tail_matches_linearization(gauss):
    # f = 1/(1+x) is conjugate to z -> mu z by phi(x) = (x - p)/(x - q), so the
    # normalized iterates tend to the affine rescaling of phi on I(1)
    p, q = (math.sqrt(5) - 1) / 2, -(1 + math.sqrt(5)) / 2
    lo, hi = gauss.base_intervals[1]
    phi = lambda x: (x - p) / (x - q)
    x = equispaced_grid(gauss, 1, GRID)
    expected = lo + (hi - lo) * (phi(x) - phi(lo)) / (phi(hi) - phi(lo))
    k = limit_geometry(gauss, (1,) * 24, 22)
    # agreement up to the recorded truncation residual of depth 22
    assert np.max(np.abs(k.value(x) - expected)) <= k.residual


def test_gauss_residual_decay(gauss):
    tail = (1,) * 12
    k4, k8, k10 = (limit_geometry(gauss, tail, d) for d in (4, 8, 10))
    grid = equispaced_grid(gauss, 1, 100)
    assert c1_distance(k8, k10, grid) / c1_distance(k4, k10, grid) < 0.2
    res = residual_sequence(gauss, (1,) * 16, [4, 6, 8, 10, 12], step=2)
    assert all(b / a < 0.25 for a, b in zip(res, res[1:]))


def test_inverse_round_trip(gauss):
    k = limit_geometry(gauss, greedy_tail(gauss.spec, 2, 12), 10)
    x = equispaced_grid(gauss, 2, 33)
    assert np.max(np.abs(k.inverse(k.value(x)) - x)) < 1e-13


def test_depth_exceeds_tail(gauss):
    with pytest.raises(DepthExceedsTail):
        limit_geometry(gauss, (1, 1, 1), 3)


def test_affine_relation(third, gauss):
    assert check_affine_relation(third, (0, 1) * 8, 3, depth=10).residual < 1e-12
    assert check_affine_relation(gauss, (1, 2) * 8, 0, depth=10).residual == 0
    rep = check_affine_relation(gauss, (2, 1, 1, 2, 1, 1, 1, 2, 2, 1, 1, 2, 1, 1), 2, depth=10)
    assert rep.within_truncation


def test_h_prime_one(third, gauss):
    a = h_prime_one_profile(two_ratio(0.3, 0.2), (0, 1, 1, 0, 0, 1, 1, 0), (1, 1, 0, 1, 0, 0, 1, 0), depth=6)
    assert a.max_abs < 1e-10
    same = h_prime_one_profile(gauss, (1,) * 16, (1,) * 16, depth=12)
    assert same.max_abs == 0
    prof = h_prime_one_profile(gauss, (1,) * 16, (1,) * 14 + (2, 1), equispaced_grid(gauss, 1, 50), depth=12)
    assert prof.max_abs > 0.01
    with pytest.raises(TailMismatch):
        h_prime_one_profile(gauss, (1,) * 16, (1,) * 15 + (2,))


def test_eigenvalue_ratios(third, gauss):
    (e,) = eigenvalue_ratio_report(third, [(0,), (0, 1)])
    assert e.eigenvalues == pytest.approx((3, 9)) and e.ratio == pytest.approx(2) and e.convergents[0] == (2, 1)
    (e,) = eigenvalue_ratio_report(two_ratio(0.5, 1 / 3), [(0,), (1,)])
    assert e.ratio == pytest.approx(math.log(3) / math.log(2))
    assert e.convergents[:5] == [(1, 1), (2, 1), (3, 2), (8, 5), (19, 12)]
    (e,) = eigenvalue_ratio_report(gauss, [(1,), (2,)])
    phi = (1 + math.sqrt(5)) / 2
    assert e.ratio == pytest.approx(math.log((1 + math.sqrt(2)) ** 2) / math.log(phi**2), rel=1e-12)


def test_convergents_against_mpmath():
    mpmath.mp.dps = 50
    x = mpmath.log(3) / mpmath.log(2)
    # reference: continued fraction digits in 50-digit arithmetic
    ref, p0, q0, p1, q1, y = [], 1, 0, 0, 1, x
    while True:
        a = int(mpmath.floor(y))
        p0, q0, p1, q1 = a * p0 + p1, a * q0 + q1, p0, q0
        if q0 > 10**6:
            break
        ref.append((p0, q0))
        y = 1 / (y - a)
    assert convergents(float(x), 10**6) == ref
