import math

import mpmath
import numpy as np
import pytest

from cantorlab.errors import EmptyScale, InadmissibleJoin
from cantorlab.scale_space import (
    RelativeScale, calibrate_c5, default_basepoints, default_tail, empirical_recurrence_map,
    good_scale_indicator, relative_projection, renormalize, renormalize_pair,
)
from cantorlab.symbolic import enumerate_words
from cantorlab.sum_image import j_r_grid

from conftest import LOG23


def point(system, a=0, a2=None, s=1.0):
    return RelativeScale(default_tail(system, a), default_tail(system, a if a2 is None else a2), s)


def test_renormalize_affine(third_n):
    p = point(third_n)
    # a word of n+1 symbols is n branch applications: (0,0,0) has |I| = 1/9
    out = renormalize(third_n, p, (0, 0, 0))
    assert out.s == pytest.approx(9) and out.tail[-3:] == (0, 0, 0)
    assert renormalize(third_n, p, (0, 0)).s == pytest.approx(3)
    back = renormalize(third_n, RelativeScale(p.tail, p.tail2, 9.0), (0, 0, 0), primed=True)
    assert back.s == pytest.approx(1)


def test_renormalize_sign(gauss):
    p = point(gauss, 1, s=-0.7)
    assert renormalize(gauss, p, (1, 1, 1)).s < 0  # two reversing branches
    assert renormalize(gauss, p, (1, 1)).s > 0


def _mp_length(word_chain, lo, hi):
    """|f(I)| for f = 1/(d0 + 1/(d1 + ... (x))) in 50-digit arithmetic."""
    def f(x):
        for d in reversed(word_chain):
            x = 1 / (d + x)
        return x
    return abs(f(mpmath.mpf(hi)) - f(mpmath.mpf(lo)))


def test_renormalize_gauss_against_mpmath(gauss):
    mpmath.mp.dps = 50
    tail = (2, 1, 1, 2, 1, 2, 2, 1, 1)
    word = (1, 2, 2, 1)
    p = RelativeScale(tail, tail, 1.3)
    got = renormalize(gauss, p, word).s
    # the branch of (a, b) is x -> 1/(a + x); f_tail applies digits tail[0..-2]
    base = gauss.base_intervals
    num = _mp_length(list(tail[:-1]) + list(word[:-1]), *base[word[-1]])
    den = _mp_length(list(tail[:-1]), *base[tail[-1]])
    ratio = num / den
    eps = (-1) ** (len(word) - 1)
    expected = eps * 1.3 * (mpmath.mpf(gauss.base_length(word[-1])) / gauss.base_length(word[0])) / ratio
    assert got == pytest.approx(float(expected), rel=1e-12)


def test_cocycle(gauss):
    rng = np.random.default_rng(3)
    words = enumerate_words(gauss.spec, 4)
    for _ in range(50):
        u = words[rng.integers(len(words))]
        u = (1,) + u[1:]
        v = words[rng.integers(len(words))]
        v = (u[-1],) + v[1:]
        p = point(gauss, 1, s=float(rng.uniform(0.3, 3)))
        step = renormalize(gauss, renormalize(gauss, p, u), v)
        once = renormalize(gauss, p, u + v[1:])
        assert step.s == pytest.approx(once.s, rel=1e-12)


def test_inadmissible_join(gauss):
    with pytest.raises(InadmissibleJoin):
        renormalize(gauss, point(gauss, 1), (2, 1))


def test_relative_projection(third_n):
    p = point(third_n)
    bp = default_basepoints(third_n)
    assert relative_projection((third_n, third_n), p, bp.points[0], bp.points[0]) == 0
    assert relative_projection((third_n, third_n), p, 1.0, 1 / 3) == pytest.approx(2 / 3, abs=1e-9)


@pytest.fixture(scope="module")
def third_c5(third):
    pair = (third, third)
    tails = [(default_tail(third, 0), default_tail(third, 0))]
    return calibrate_c5(pair, tails, 2.0**-6, j_r_grid(4, 6), 3, 4.0, 2.0, 2 * LOG23)


def test_good_scale_conditions(third, third_c5):
    pair = (third, third)
    p = point(third)
    res = good_scale_indicator(pair, p, 2.0**-6, 3, third_c5, dims=2 * LOG23)
    assert res.condition1 and res.condition2
    bad = good_scale_indicator(pair, p, 2.0**-6, 3, 0.0, dims=2 * LOG23)
    assert not bad.condition1 and not bad.condition2


def test_resonant_scale_count(third, third_c5):
    pair = (third, third)
    at_one = good_scale_indicator(pair, point(third, s=1.0), 2.0**-6, 3, third_c5, dims=2 * LOG23)
    generic = good_scale_indicator(pair, point(third, s=math.sqrt(2)), 2.0**-6, 3, third_c5, dims=2 * LOG23)
    assert at_one.count1 > generic.count1


def test_recurrence_report(gauss):
    rep = empirical_recurrence_map((gauss, gauss), 2.0**-5, j_r_grid(4, 4), c5=50.0)
    fr = [r.fraction for r in rep.rows if r.fraction is not None]
    assert fr and all(0 <= f <= 1 for f in fr)
    none_good = empirical_recurrence_map((gauss, gauss), 2.0**-5, j_r_grid(4, 4), c5=1e-9)
    assert all(v == 0.0 for v in none_good.tail_fraction.values())
    with pytest.raises(EmptyScale):
        empirical_recurrence_map((gauss, gauss), 0.9, j_r_grid(4, 4), c5=1.0, c0=1.0)
