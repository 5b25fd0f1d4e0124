import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cantorlab.errors import BudgetExceeded, NotMixing, UnusedLetter
from cantorlab.symbolic import enumerate_words, greedy_extension, greedy_tail, validate_subshift, words_at_scale

FULL = [(0, 0), (0, 1), (1, 0), (1, 1)]
GOLDEN = [(0, 0), (0, 1), (1, 0)]


def test_mixing_power():
    assert validate_subshift([0, 1], FULL).mixing_power == 1
    assert validate_subshift([0, 1], GOLDEN).mixing_power == 2


def test_unused_letter():
    with pytest.raises(UnusedLetter):
        validate_subshift([0, 1], [(0, 0)])


def test_not_mixing():
    # two disjoint loops
    with pytest.raises(NotMixing):
        validate_subshift([0, 1], [(0, 0), (1, 1)])
    # periodic: 0 -> 1 -> 0 only
    with pytest.raises(NotMixing):
        validate_subshift([0, 1], [(0, 1), (1, 0)])


def test_enumerate_counts():
    full = validate_subshift([0, 1], FULL)
    golden = validate_subshift([0, 1], GOLDEN)
    assert len(enumerate_words(full, 3)) == 8
    assert enumerate_words(golden, 3) == [(0, 0, 0), (0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 0, 1)]
    assert enumerate_words(golden, 1) == [(0,), (1,)]


@settings(max_examples=40, deadline=None)
@given(st.sets(st.tuples(st.integers(0, 2), st.integers(0, 2)), min_size=3), st.integers(1, 5))
def test_enumerate_matches_filter(trans, length):
    try:
        spec = validate_subshift([0, 1, 2], sorted(trans))
    except (UnusedLetter, NotMixing):
        return
    brute = [w for w in itertools.product([0, 1, 2], repeat=length) if all((a, b) in trans for a, b in zip(w, w[1:]))]
    assert enumerate_words(spec, length) == brute
    # count from matrix powers
    ones = np.ones(3, dtype=np.int64)
    assert len(brute) == ones @ np.linalg.matrix_power(spec.matrix().astype(np.int64), length - 1) @ ones


def test_words_at_scale_normalized(third_n):
    # lengths 1/3, 1/9, 1/27 all lie in (rho/c0, c0 rho] = (1/27, 1/3]
    words = words_at_scale(third_n, 1 / 9, 3.0)
    assert len(words) == 28
    assert sorted({len(w) for w in words}) == [2, 3, 4]
    assert len(words_at_scale(third_n, 1 / 9, 1.0)) == 8


def test_words_at_scale_gauss_bruteforce(gauss):
    rho, c0 = 0.05, 2.0
    got = set(words_at_scale(gauss, rho, c0))
    brute = set()
    for n in range(1, 12):
        for w in enumerate_words(gauss.spec, n):
            if rho / c0 < gauss.cylinder_length(w) <= c0 * rho:
                brute.add(w)
    assert got == brute and got


def test_words_at_scale_budget(third):
    with pytest.raises(BudgetExceeded):
        words_at_scale(third, 1e-6, 2.0, budget=100)


def test_greedy_words(gauss):
    spec = gauss.spec
    assert greedy_extension(spec, 2, 4) == (2, 1, 1, 1)
    assert greedy_tail(spec, 2, 4) == (1, 1, 1, 2)
