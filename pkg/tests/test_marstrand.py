import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from cantorlab.errors import EmptyScale, HypothesisViolated
from cantorlab.marstrand import (
    DeltaRectangle, as_arrays, count_overlaps, count_overlaps_bruteforce, delta_rectangles,
    integral_by_quadrature, integral_estimate, interval_union, overlap_lambda_measure,
    projection_lower_bound, projection_union_measure, sublemma_one, sublemma_two,
    sublemma_union_bounds, union_measure,
)
from cantorlab.symbolic import enumerate_words


def rect(x, y, u=0.0, v=0.0):
    return DeltaRectangle((), (), (x, y), (u, v))


def random_rects(rng, m):
    return as_arrays([rect(*rng.uniform(-1, 1, 2), *rng.uniform(0, 0.05, 2)) for _ in range(m)])


def test_rectangle_counts(third, third_n):
    # normalized layout: one copy of [0, 1] per symbol, so fix the first symbol
    rects = delta_rectangles((third_n, third_n), 1 / 3, 1.0, starts=((0,), (0,)))
    assert len(rects) == 4 and {len(r.word) for r in rects} == {2}
    assert len(delta_rectangles((third, third), 1 / 3, 1.0)) == 4
    assert len(delta_rectangles((third, third), 1 / 9, 1.0)) == 16
    with pytest.raises(EmptyScale):
        delta_rectangles((third, third), 0.9, 1.0)


def test_rectangles_gauss_bruteforce(gauss):
    delta, c0 = 0.05, 2.0
    words = [w for n in range(1, 10) for w in enumerate_words(gauss.spec, n)
             if delta / c0 < gauss.cylinder_length(w) <= c0 * delta]
    got = {(r.word, r.word2) for r in delta_rectangles((gauss, gauss), delta, c0)}
    assert got == {(a, b) for a in words for b in words}


def test_count_examples(third):
    assert count_overlaps([rect(0.3, 0.2, 0.1, 0.1)], 1.7) == 1
    assert count_overlaps([rect(0, 0), rect(5, 0)], 1.0) == 2
    rects = delta_rectangles((third, third), 1 / 3, 1.0)
    assert count_overlaps(rects, 1.0) == 14 == count_overlaps_bruteforce(rects, 1.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 200))
def test_sweep_equals_bruteforce(seed, m):
    rng = np.random.default_rng(seed)
    rects = random_rects(rng, m)
    for s in rng.uniform(-4, 4, 10):
        n = count_overlaps(rects, s)
        assert n == count_overlaps_bruteforce(rects, s)
        assert m <= n <= m * m and n % 2 == m % 2


def test_lambda_measure_examples():
    q = rect(0.2, 0.4, 0.05, 0.1)
    assert overlap_lambda_measure(q, q, 4) == pytest.approx(8)
    assert overlap_lambda_measure(rect(0, 0), rect(1, 1), 4) == 0
    assert overlap_lambda_measure(rect(0, 0, 0.1, 0), rect(1, 1), 4) == pytest.approx(0.2)


@settings(max_examples=40, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2).filter(lambda v: v == 0 or abs(v) > 1e-6), st.floats(0, 0.5), st.floats(0, 0.5), st.floats(0.5, 5))
def test_lambda_measure_against_grid(dx, dy, U, V, R):
    lam = np.linspace(-R, R, 200001)
    hit = np.abs(dx - lam * dy) <= U + np.abs(lam) * V
    grid_meas = hit.mean() * 2 * R
    got = overlap_lambda_measure(rect(0, 0, U, V), rect(dx, dy), R)
    assert got == pytest.approx(grid_meas, abs=2 * (2 * R / 200000) * 4)


def test_integral_examples(third):
    assert integral_estimate([rect(0.1, 0.2, 0.01, 0.01)], 4) == pytest.approx(8)
    assert integral_estimate([rect(0, 0), rect(100, 0.5)], 4) == pytest.approx(16)


def test_integral_matches_quadrature(third):
    rects = delta_rectangles((third, third), 1 / 27, 1.0)
    exact = integral_estimate(rects, 4)
    assert integral_by_quadrature(rects, 4, 1e-4) == pytest.approx(exact, rel=1e-3)


def test_union_measure_vs_sympy():
    rng = np.random.default_rng(7)
    for _ in range(20):
        ivs = [(float(a), float(a + w)) for a, w in zip(rng.uniform(0, 3, 12), rng.uniform(0, 0.5, 12))]
        ref = sympy.Union(*[sympy.Interval(a, b) for a, b in ivs]).measure
        assert union_measure(ivs) == pytest.approx(float(ref), abs=1e-12)
    assert interval_union([(0, 1), (1 + 1e-13, 2)]) == [(0, 2)]


def test_projection_union_examples():
    assert projection_union_measure([rect(0, 0, 0.1, 0.2)], -1.5) == pytest.approx(2 * (0.1 + 1.5 * 0.2))
    assert projection_union_measure([rect(0, 0, 0.1, 0), rect(1, 0, 0.2, 0)], 1.0) == pytest.approx(0.6)
    assert projection_union_measure([rect(0, 0, 0.5, 0), rect(0.1, 0, 0.1, 0)], 1.0) == pytest.approx(1.0)


def test_projection_lower_bound_closed_form():
    # c0^-1 c~^-1 b^2 delta^(1-D) / 4 with b = #F delta^D and c~ = N delta^D
    D, delta, F, N, c0 = 0.7, 3.0**-4, 37, 900, 3.0
    b, ct = F * delta**D, N * delta**D
    assert projection_lower_bound(F, delta, c0, N) == pytest.approx(b * b * delta ** (1 - D) / (4 * c0 * ct))


def test_sublemma_examples():
    J = [(0, 1.5), (3, 4.2), (3.5, 5)]
    (one,) = sublemma_union_bounds(J, J_prime=J, eps=1.0, lam=2.0, nu=1.0)
    assert one.holds and one.lhs == pytest.approx(union_measure(J))
    (two,) = sublemma_union_bounds(J, K=[[iv] for iv in J], nu=1.0)
    assert two.holds and two.lhs == pytest.approx(2 * two.rhs)


def test_sublemma_hypotheses():
    with pytest.raises(HypothesisViolated):
        sublemma_one([(0, 3)], [(0, 3)], eps=1.0, lam=2.0, nu=1.0)  # |J| >= lam·eps
    with pytest.raises(HypothesisViolated):
        sublemma_one([(0, 1.5)], [(5, 6.5)], eps=1.0, lam=2.0, nu=1.0)  # centers too far
    with pytest.raises(HypothesisViolated):
        sublemma_two([(0, 1)], [[(0, 0.2)]], nu=0.5)  # K carries too little
    with pytest.raises(HypothesisViolated):
        sublemma_two([(0, 1)], [[(0.5, 1.2)]], nu=0.5)  # K leaves J


def sublemma_one_family(rng, size=100, eps=1.0, lam=2.0, nu=1.0):
    c = rng.uniform(0, 60, size)
    lj = rng.uniform(eps, lam * eps, size)
    lp = rng.uniform(eps, 3 * lam * eps, size)
    cp = c + rng.uniform(-nu * eps, nu * eps, size)
    eps_in = eps * (1 - 1e-9)
    J = np.column_stack([c - lj / 2, c + lj / 2])
    Jp = np.column_stack([cp - lp / 2, cp + lp / 2])
    return J, Jp, eps_in


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_sublemma_one_random(seed):
    J, Jp, eps = sublemma_one_family(np.random.default_rng(seed))
    assert sublemma_one(J, Jp, eps, 2.0, 1.0).holds
