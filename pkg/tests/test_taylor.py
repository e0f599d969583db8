import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyapprox.domain import Ball, Interval
from polyapprox.errors import OutOfDomainError
from polyapprox.field import corpus_field, polynomial_field
from polyapprox.multiindex import indices_upto
from polyapprox.polyspace import Polynomial
from polyapprox.taylor import averaged_taylor, bump_profile, mollifier, taylor_poly


def _random_poly(rng, dim, degree):
    return Polynomial(dim, degree, {a: rng.uniform(-1, 1) for a in indices_upto(dim, degree)})


def test_taylor_examples():
    sq = polynomial_field(Polynomial(1, 2, {(2,): 1.0}))
    assert taylor_poly(sq, [0.0], 3).max_coeff_diff(Polynomial(1, 2, {(2,): 1.0})) == 0.0
    t = taylor_poly(corpus_field("exp", 1), [0.0], 2)
    assert (t.coeff((0,)), t.coeff((1,))) == (1.0, 1.0)
    c = taylor_poly(corpus_field("sin", 2), [0.1, 0.2], 1)
    assert c.degree() == 0 and c.coeff((0, 0)) == pytest.approx(math.sin(0.3 * math.pi))


def test_taylor_about_offset_point():
    # e^x about y = 1 to order 3: e (1 + (x-1) + (x-1)^2/2)
    t = taylor_poly(corpus_field("exp", 1), [1.0], 3)
    x = np.array([[0.4]])
    assert t(x)[0] == pytest.approx(math.e * (1 - 0.6 + 0.18), rel=1e-14)


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_mollifier_examples(dim):
    B = mollifier(np.full(dim, 0.3), 0.7)
    assert abs(B.integral() - 1.0) <= 1e-10
    rim = B.center.copy()
    rim[0] += B.radius
    assert B(rim) == 0.0
    assert B(B.center) == pytest.approx(B.scale * math.exp(-1.0))
    assert B(B.center) > 0


def test_mollifier_rejects_bad_radius():
    with pytest.raises(ValueError):
        mollifier([0.0], 0.0)


def test_bump_profile_support():
    np.testing.assert_array_equal(bump_profile(np.array([-1.0, 1.0, 2.0])), 0.0)
    assert (bump_profile(np.linspace(-0.99, 0.99, 11)) > 0).all()


@pytest.mark.parametrize("dim, m", [(1, 1), (1, 4), (2, 2), (2, 4), (3, 3)])
def test_reproduces_lower_degree_polynomials(dim, m):
    rng = np.random.default_rng(dim * 10 + m)
    B = mollifier(rng.uniform(-1, 1, dim), 0.8)
    for _ in range(5):
        v = _random_poly(rng, dim, m - 1)
        assert averaged_taylor(polynomial_field(v), B, m).max_coeff_diff(v) <= 1e-8


def test_linear_field_m1_gives_center_value():
    u = polynomial_field(Polynomial(2, 1, {(1, 0): 2.0, (0, 1): -1.0, (0, 0): 0.5}))
    B = mollifier([0.3, 0.4], 0.25)
    Q = averaged_taylor(u, B, 1)
    assert Q.degree() <= 0
    assert Q.coeff((0, 0)) == pytest.approx(u(np.array([0.3, 0.4])), abs=1e-8)


def trapezoid_oracle_exp():
    """Q^2 of e^x on (-1/4, 1/4) by a 10^5 node trapezoid rule.

    ``Q(x) = int e^y (1 - y) psi + x int e^y psi`` with psi normalized on
    the same grid.
    """
    y = np.linspace(-0.25, 0.25, 100_000)
    w = np.full(y.size, y[1] - y[0])
    w[[0, -1]] *= 0.5
    prof = np.zeros_like(y)
    inner = np.abs(y) < 0.25
    prof[inner] = np.exp(-1.0 / (1.0 - (y[inner] / 0.25) ** 2))
    psi = prof / np.sum(w * prof)
    return np.sum(w * np.exp(y) * (1 - y) * psi), np.sum(w * np.exp(y) * psi)


def test_exp_matches_trapezoid_oracle():
    c0, c1 = trapezoid_oracle_exp()
    Q = averaged_taylor(corpus_field("exp", 1), mollifier([0.0], 0.25), 2)
    assert abs(Q.coeff((0,)) - c0) <= 1e-6
    assert abs(Q.coeff((1,)) - c1) <= 1e-6


def test_degree_bound():
    B = mollifier([0.0, 0.0], 0.5)
    for m in (1, 2, 3):
        Q = averaged_taylor(corpus_field("runge", 2), B, m)
        assert Q.degree() <= m - 1


@settings(max_examples=20, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_linearity(a, b):
    B = mollifier([0.1, -0.2], 0.5, order=16)
    u, w = corpus_field("sin", 2), corpus_field("exp", 2)
    lhs = averaged_taylor(u * a + w * b, B, 3)
    rhs = averaged_taylor(u, B, 3) * a + averaged_taylor(w, B, 3) * b
    assert lhs.max_coeff_diff(rhs) <= 1e-9 * (1 + abs(a) + abs(b))


@pytest.mark.parametrize("lam", [0.5, 0.125, 4.0])
def test_commutes_with_dilation(lam):
    c, r = np.array([0.5, 0.5]), 0.5
    u = corpus_field("poly5", 2)
    Q = averaged_taylor(u, mollifier(c, r), 3)
    Q_lam = averaged_taylor(u.dilate(lam), mollifier(lam * c, lam * r), 3)
    pts = lam * np.random.default_rng(0).uniform(0, 1, (20, 2))
    np.testing.assert_allclose(Q_lam(pts), Q.dilate(lam)(pts), rtol=1e-10, atol=1e-12)


def test_ball_must_lie_in_region():
    u = corpus_field("exp", 1)
    u.region = Interval(0.0, 1.0)
    averaged_taylor(u, mollifier([0.5], 0.5), 2)
    with pytest.raises(OutOfDomainError):
        averaged_taylor(u, mollifier([0.9], 0.5), 2)
    v = corpus_field("exp", 2)
    v.region = Ball((0.0, 0.0), 1.0)
    with pytest.raises(OutOfDomainError):
        averaged_taylor(v, mollifier([0.5, 0.0], 0.6), 2)
