import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyapprox.errors import DimensionMismatchError, InvalidDimensionError
from polyapprox.multiindex import MultiIndex, enumerate_indices, factorial, indices_upto, power


def test_enumerate_small_cases():
    assert enumerate_indices(2, 2) == [(2, 0), (1, 1), (0, 2)]
    assert enumerate_indices(3, 0) == [(0, 0, 0)]
    assert len(enumerate_indices(2, 3)) == 4


def test_enumerate_rejects_zero_dimension():
    with pytest.raises(InvalidDimensionError):
        enumerate_indices(0, 2)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("k", range(7))
def test_enumerate_matches_brute_force(n, k):
    brute = {a for a in itertools.product(range(k + 1), repeat=n) if sum(a) == k}
    got = enumerate_indices(n, k)
    assert len(got) == len(brute) == math.comb(k + n - 1, n - 1)
    assert set(got) == brute
    assert enumerate_indices(n, k) == got


def test_order_is_graded_lexicographic():
    idx = indices_upto(3, 3)
    keys = [(a.order(), tuple(-e for e in a)) for a in idx]
    assert keys == sorted(keys)


@pytest.mark.parametrize("alpha, expected", [((2, 1, 0), 2), ((0, 0), 1), ((3, 2), 12)])
def test_factorial(alpha, expected):
    assert factorial(alpha) == expected
    assert MultiIndex(alpha).factorial() == expected


@pytest.mark.parametrize("alpha, z, expected", [
    ((1, 2), (3, 2), 12),
    ((0, 0), (7.5, -3), 1),
    ((2, 0, 1), (-1, 5, 2), 2),
])
def test_power(alpha, z, expected):
    assert power(alpha, z) == expected


def test_zero_to_the_zero_is_one():
    assert power((0, 1), (0.0, 2.0)) == 2.0


def test_power_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        power((1, 2), (1.0, 2.0, 3.0))


def test_power_batch():
    z = np.array([[1.0, 2.0], [3.0, -1.0]])
    np.testing.assert_array_equal(power((1, 2), z), [4.0, 3.0])


def test_negative_exponent_rejected():
    with pytest.raises(ValueError):
        MultiIndex((1, -1))


exps = st.lists(st.integers(0, 3), min_size=3, max_size=3)
coords = st.lists(st.floats(-10, 10), min_size=3, max_size=3)


@settings(max_examples=200, deadline=None)
@given(exps, exps, coords)
def test_power_is_multiplicative(a, b, z):
    a, b = MultiIndex(a), MultiIndex(b)
    lhs = power(a, z) * power(b, z)
    rhs = power(a + b, z)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))
