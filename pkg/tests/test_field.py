import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyapprox.domain import Ball, Box, Interval, QuadSpec, quadrature
from polyapprox.errors import DimensionMismatchError, InsufficientSmoothnessError
from polyapprox.field import (
    CORPUS,
    DifferentiableField,
    corpus_field,
    deriv,
    parse_field,
    polynomial_field,
    sobolev_norm,
    sobolev_seminorm,
)
from polyapprox.multiindex import indices_upto
from polyapprox.polyspace import Polynomial

INF = math.inf


def _poly(dim, coeffs):
    return polynomial_field(Polynomial(dim, max(sum(a) for a in coeffs), coeffs))


def _gauss(dom, order=12):
    return quadrature(dom, QuadSpec(order=order))


def test_deriv_examples():
    u = _poly(2, {(2, 1): 1.0})
    assert deriv(u, (1, 0))(np.array([[1.0, 2.0]]))[0] == 4.0
    assert deriv(u, (0, 0)) is u.func


def test_finite_difference_second_derivative():
    u = DifferentiableField(1, lambda X: np.sin(np.pi * X[:, 0]), m_max=4, label="sin")
    val = deriv(u, (2,))(np.array([[0.5]]))[0]
    assert abs(val + np.pi ** 2) < 1e-5


def test_insufficient_smoothness():
    u = corpus_field("exp", 1, m_max=2)
    with pytest.raises(InsufficientSmoothnessError):
        deriv(u, (3,))
    with pytest.raises(InsufficientSmoothnessError):
        sobolev_seminorm(u, Interval(0.0, 1.0), 3, 2.0, _gauss(Interval(0.0, 1.0)))


def test_deriv_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        deriv(corpus_field("exp", 2), (1,))


@pytest.mark.parametrize("label", CORPUS)
@pytest.mark.parametrize("dim", [1, 2])
def test_finite_differences_agree_with_tables(label, dim):
    u = corpus_field(label, dim, m_max=3)
    bare = DifferentiableField(dim, u.func, m_max=3, label=label)
    pts = Box((-0.5,) * dim, (0.5,) * dim).probe_grid(7 if dim == 2 else 33)
    for alpha in indices_upto(dim, 2):
        if alpha.order() == 0:
            continue
        exact = deriv(u, alpha)(pts)
        approx = deriv(bare, alpha)(pts)
        assert np.max(np.abs(exact - approx)) <= 1e-5 * max(1.0, np.max(np.abs(exact)))


def test_corpus_values():
    x = np.array([[0.3, 0.4]])
    assert corpus_field("poly2", 2)(x)[0] == pytest.approx(0.25)
    assert corpus_field("runge", 2)(x)[0] == pytest.approx(1 / (1 + 25 * 0.25))
    assert corpus_field("sin", 2)(x)[0] == pytest.approx(math.sin(0.7 * math.pi))
    assert corpus_field("poly3", 1)(np.array([[2.0]]))[0] == pytest.approx(8 - 8 + 1)


def test_parse_field():
    u = parse_field("poly:x^2*y+3*x-1", 2)
    assert u(np.array([2.0, 3.0])) == pytest.approx(12 + 6 - 1)
    assert deriv(u, (1, 1))(np.array([[2.0, 3.0]]))[0] == pytest.approx(4.0)
    with pytest.raises(KeyError):
        parse_field("cosh", 1)
    with pytest.raises(ValueError):
        parse_field("poly:x^2+q", 1)


def test_seminorm_examples():
    sq = Box((0.0, 0.0), (1.0, 1.0))
    assert sobolev_seminorm(corpus_field("poly2", 2), sq, 2, 2.0, _gauss(sq)).value == \
        pytest.approx(math.sqrt(8), rel=1e-13)
    iv = Interval(0.0, 1.0)
    lin = _poly(1, {(1,): 3.0, (0,): 1.0})
    for p in (1.0, 2.0, INF):
        assert sobolev_seminorm(lin, iv, 2, p, _gauss(iv)).value == 0.0
    cube = _poly(1, {(3,): 1.0})
    assert sobolev_seminorm(cube, iv, 2, INF, _gauss(iv)).value == pytest.approx(6.0, rel=1e-14)


def test_sup_is_never_above_true_sup():
    iv = Interval(0.0, 1.0)
    u = corpus_field("sin", 1)
    val = sobolev_seminorm(u, iv, 1, INF, _gauss(iv)).value
    assert val <= math.pi
    assert val == pytest.approx(math.pi, rel=1e-12)  # x = 0 is on the probe grid


def test_norm_combines_orders():
    iv = Interval(0.0, 1.0)
    u = _poly(1, {(1,): 1.0})
    q = _gauss(iv)
    # |x|_0^2 = 1/3, |x|_1^2 = 1
    assert sobolev_norm(u, iv, 1, 2.0, q) == pytest.approx(math.sqrt(4 / 3), rel=1e-13)
    assert sobolev_norm(u, iv, 1, INF, q) == pytest.approx(1.0)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_seminorm_annihilates_lower_degree(n, m):
    rng = np.random.default_rng(100 * n + m)
    dom = Box((0.0,) * n, (1.0,) * n)
    q = _gauss(dom, 5)
    for _ in range(20):
        v = Polynomial(n, m - 1, {a: rng.uniform(-1, 1) for a in indices_upto(n, m - 1)})
        for p in (1.0, 2.0, INF):
            assert sobolev_seminorm(polynomial_field(v), dom, m, p, q, probe=8).value <= 1e-9


@pytest.mark.parametrize("label", ["sin", "exp", "runge"])
@pytest.mark.parametrize("p", [1.0, 2.0, INF])
def test_translation_invariance(label, p):
    dom = Box((0.0, 0.0), (1.0, 0.5))
    shift = np.array([0.3, -0.7])
    u = corpus_field(label, 2)
    a = sobolev_seminorm(u, dom, 2, p, _gauss(dom)).value
    b = sobolev_seminorm(u.translate(shift), dom.shifted(shift), 2, p, _gauss(dom.shifted(shift))).value
    assert abs(a - b) <= 1e-7 * a


@pytest.mark.parametrize("label", CORPUS)
@pytest.mark.parametrize("k", [0, 1, 2, 3])
@pytest.mark.parametrize("p", [1.0, 2.0, 3.5])
def test_dilation_scaling(label, k, p):
    dom = Box((0.0, 0.0), (1.0, 1.0))
    u = corpus_field(label, 2)
    base = sobolev_seminorm(u, dom, k, p, _gauss(dom)).value
    for lam in (0.5, 0.125, 3.0):
        big = dom.scaled(lam)
        val = sobolev_seminorm(u.dilate(lam), big, k, p, _gauss(big)).value
        assert val == pytest.approx(lam ** (2 / p - k) * base, rel=1e-6, abs=1e-300)


@pytest.mark.parametrize("label", CORPUS)
def test_refinement_stability(label):
    # runge needs 24 points per axis before the doubling gain drops below 1e-6
    dom = Box((0.0, 0.0), (1.0, 1.0))
    u = corpus_field(label, 2)
    for m in (0, 1, 2):
        coarse = sobolev_seminorm(u, dom, m, 2.0, _gauss(dom, 24)).value
        fine = sobolev_seminorm(u, dom, m, 2.0, _gauss(dom, 48)).value
        assert abs(coarse - fine) <= 1e-6 * max(fine, 1e-300)


def test_seminorm_translation_through_region():
    u = corpus_field("exp", 2)
    u.region = Ball((0.0, 0.0), 1.0)
    moved = u.translate([1.0, 0.0])
    assert moved.region == Ball((1.0, 0.0), 1.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.2, 3.0))
def test_compose_affine_chain_rule(x, y, lam):
    u = corpus_field("poly3", 2)
    v = u.compose_affine(lam, [0.5, -0.5])
    pt = np.array([[x, y]])
    inner = (pt - [0.5, -0.5]) / lam
    assert deriv(v, (1, 0))(pt)[0] == pytest.approx(deriv(u, (1, 0))(inner)[0] / lam, rel=1e-12, abs=1e-12)
    assert deriv(v, (2, 0))(pt)[0] == pytest.approx(deriv(u, (2, 0))(inner)[0] / lam ** 2, rel=1e-12, abs=1e-12)


def test_field_arithmetic_keeps_exact_derivatives():
    u = corpus_field("exp", 1)
    w = u - Polynomial(1, 1, {(1,): 1.0})
    x = np.array([[0.2]])
    assert deriv(w, (1,))(x)[0] == pytest.approx(math.exp(0.2) - 1.0, rel=1e-14)
    assert (2.0 * u)(x)[0] == pytest.approx(2 * math.exp(0.2))
