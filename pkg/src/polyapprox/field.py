"""Differentiable fields and Sobolev seminorms.

A :class:`DifferentiableField` bundles a vectorized evaluator with a table
of partial derivatives keyed by multi-index.  Entries missing from the table
(but within the declared smoothness) are synthesized by Richardson
extrapolated central differences.

The built-in corpus is generated symbolically with sympy, so every
derivative in it is exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping, Optional

import numpy as np
import sympy as sp

from .errors import (
    DimensionMismatchError,
    EmptyQuadratureError,
    InsufficientSmoothnessError,
)
from .multiindex import MultiIndex, enumerate_indices, indices_upto
from .polyspace import Polynomial

__all__ = [
    "DifferentiableField", "SeminormValue", "deriv", "sobolev_seminorm", "sobolev_norm",
    "lp_seminorm_on", "corpus_field", "parse_field", "CORPUS", "polynomial_field",
]

CORPUS = ("poly2", "poly3", "poly5", "sin", "exp", "runge")

PROBE_PER_AXIS = 64

Func = Callable[[np.ndarray], np.ndarray]


def _points(x, dim):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != dim:
        raise DimensionMismatchError(f"{dim}-variate field evaluated at shape {x.shape}")
    return x.reshape(-1, dim), x.ndim == 1


class DifferentiableField:
    """Scalar function on R^n with access to partial derivatives up to `m_max`.

    Parameters
    ----------
    dim : int
        Number of variables.
    func : callable
        ``(N, dim) -> (N,)``.
    derivs : mapping, optional
        Multi-index to callable of the same signature.  May be partial.
    m_max : int
        Highest derivative order the field promises.
    label : str
    region : Domain, optional
        Where the field may be evaluated; ``None`` means everywhere.
    """

    def __init__(self, dim: int, func: Func, derivs: Optional[Mapping] = None,
                 m_max: int = 0, label: str = "", region=None):
        self.dim = int(dim)
        self.func = func
        self.derivs = {MultiIndex(a): f for a, f in (derivs or {}).items()}
        self.m_max = int(m_max)
        self.label = label
        self.region = region

    def __call__(self, x):
        X, single = _points(x, self.dim)
        out = np.asarray(self.func(X), dtype=float).reshape(-1)
        return float(out[0]) if single else out

    def __repr__(self):
        return f"DifferentiableField({self.label!r}, dim={self.dim}, m_max={self.m_max})"

    def is_analytic(self, alpha) -> bool:
        alpha = MultiIndex(alpha)
        return alpha.order() == 0 or alpha in self.derivs

    def deriv(self, alpha) -> Func:
        return deriv(self, alpha)

    # transformations

    def compose_affine(self, scale: float, shift=None) -> "DifferentiableField":
        """The field ``x -> u((x - shift) / scale)``, derivatives included."""
        shift = np.zeros(self.dim) if shift is None else np.ravel(np.asarray(shift, dtype=float))
        inv = 1.0 / scale

        def wrap(f, factor):
            return lambda X: factor * np.asarray(f((X - shift) * inv), dtype=float)

        derivs = {a: wrap(f, inv ** a.order()) for a, f in self.derivs.items()}
        region = self.region
        if region is not None:
            region = region.scaled(scale).shifted(shift)
        return DifferentiableField(self.dim, wrap(self.func, 1.0), derivs, self.m_max,
                                   self.label, region)

    def dilate(self, lam: float) -> "DifferentiableField":
        return self.compose_affine(lam)

    def translate(self, shift) -> "DifferentiableField":
        return self.compose_affine(1.0, shift)

    # linear structure

    def _combine(self, other: "DifferentiableField", a: float, b: float) -> "DifferentiableField":
        if other.dim != self.dim:
            raise DimensionMismatchError("fields of different dimension")
        m = min(self.m_max, other.m_max)
        derivs = {}
        for alpha in indices_upto(self.dim, m):
            if alpha.order() and self.is_analytic(alpha) and other.is_analytic(alpha):
                f, g = deriv(self, alpha), deriv(other, alpha)
                derivs[alpha] = (lambda f, g: lambda X: a * f(X) + b * g(X))(f, g)
        label = f"{a:g}*{self.label}+{b:g}*{other.label}"
        return DifferentiableField(self.dim, lambda X: a * self.func(X) + b * other.func(X),
                                   derivs, m, label, self.region)

    def __add__(self, other):
        if isinstance(other, Polynomial):
            other = polynomial_field(other, self.m_max)
        return self._combine(other, 1.0, 1.0)

    def __sub__(self, other):
        if isinstance(other, Polynomial):
            other = polynomial_field(other, self.m_max)
        return self._combine(other, 1.0, -1.0)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return self._combine(self, float(scalar), 0.0)

    __rmul__ = __mul__


def polynomial_field(p: Polynomial, m_max: int = 8, label: str | None = None) -> DifferentiableField:
    """Wrap a polynomial; every derivative is exact."""
    derivs = {a: p.derivative(a) for a in indices_upto(p.dim, m_max) if a.order()}
    return DifferentiableField(p.dim, p.eval, {a: q.eval for a, q in derivs.items()},
                               m_max, label or "poly")


# -------------------------------------------------------------------------
# derivatives


def _fd_step(X: np.ndarray) -> np.ndarray:
    return 1e-3 * (1.0 + np.linalg.norm(X, axis=1))


def _richardson_partial(f: Func, i: int) -> Func:
    """Central difference in direction `i`, one Richardson level (fourth order)."""

    def df(X):
        X = np.asarray(X, dtype=float)
        h = _fd_step(X)
        e = np.zeros(X.shape[1])
        e[i] = 1.0

        def central(step):
            return (f(X + step[:, None] * e) - f(X - step[:, None] * e)) / (2 * step)

        return (4.0 * central(h / 2) - central(h)) / 3.0

    return df


def deriv(u: DifferentiableField, alpha) -> Func:
    """The partial derivative ``D^alpha u`` as a vectorized callable.

    Tabulated derivatives are returned as is.  Otherwise the highest-order
    tabulated derivative below `alpha` is differentiated numerically in the
    remaining directions.
    """
    alpha = MultiIndex(alpha)
    if len(alpha) != u.dim:
        raise DimensionMismatchError(f"multi-index {tuple(alpha)} for a {u.dim}-variate field")
    if alpha.order() > u.m_max:
        raise InsufficientSmoothnessError(
            f"{u.label or 'field'} has derivatives up to order {u.m_max}, asked for {tuple(alpha)}")
    if alpha.order() == 0:
        return u.func
    if alpha in u.derivs:
        return u.derivs[alpha]
    base = max((b for b in u.derivs if b.dominated_by(alpha)),
               key=lambda b: (b.order(), b), default=MultiIndex.zero(u.dim))
    f = u.derivs.get(base, u.func)
    for i, times in enumerate(alpha - base):
        for _ in range(times):
            f = _richardson_partial(f, i)
    return f


# -------------------------------------------------------------------------
# seminorms


@dataclass(frozen=True)
class SeminormValue:
    value: float
    m: int
    p: float
    quadrature: str

    def __float__(self):
        return self.value


def _eval(f: Func, X: np.ndarray) -> np.ndarray:
    return np.broadcast_to(np.asarray(f(X), dtype=float), (X.shape[0],))


def lp_seminorm_on(u: DifferentiableField, m: int, p: float, nodes: np.ndarray,
                   weights: Optional[np.ndarray]) -> float:
    """``|u|_{m,p}`` from derivative samples at `nodes`.

    For finite `p` the weights define the integral; for ``p = inf`` the
    weights are ignored and the maximum over the nodes is returned.
    """
    if len(nodes) == 0:
        raise EmptyQuadratureError("no quadrature nodes")
    alphas = enumerate_indices(u.dim, m)
    if np.isinf(p):
        return max(float(np.max(np.abs(_eval(deriv(u, a), nodes)))) for a in alphas)
    total = 0.0
    for a in alphas:
        total += float(np.sum(weights * np.abs(_eval(deriv(u, a), nodes)) ** p))
    return total ** (1.0 / p)


def _sup_nodes(domain, quad, probe: int) -> np.ndarray:
    return np.vstack([quad.nodes, domain.probe_grid(probe)]) if probe else quad.nodes


def sobolev_seminorm(u: DifferentiableField, domain, m: int, p: float, quad,
                     probe: int = PROBE_PER_AXIS) -> SeminormValue:
    """Seminorm built from the order-`m` partial derivatives.

    Finite `p`: ``(sum_{|a|=m} sum_i w_i |D^a u(x_i)|^p)^(1/p)``.  Infinite
    `p`: the largest ``|D^a u|`` over the quadrature nodes together with a
    ``probe``-per-axis uniform grid, an under-estimate of the true supremum.
    """
    p = float(p)
    if p < 1:
        raise ValueError(f"exponent must be >= 1, got {p}")
    if m > u.m_max:
        raise InsufficientSmoothnessError(f"order {m} exceeds smoothness {u.m_max}")
    nodes = _sup_nodes(domain, quad, probe) if np.isinf(p) else quad.nodes
    value = lp_seminorm_on(u, m, p, nodes, quad.weights)
    return SeminormValue(value, m, p, quad.scheme)


def sobolev_norm(u: DifferentiableField, domain, m: int, p: float, quad,
                 probe: int = PROBE_PER_AXIS) -> float:
    """Full norm: seminorms of orders ``0..m`` combined in l^p (max for p = inf)."""
    parts = [sobolev_seminorm(u, domain, k, p, quad, probe).value for k in range(m + 1)]
    if np.isinf(p):
        return max(parts)
    return float(sum(v ** p for v in parts) ** (1.0 / p))


# -------------------------------------------------------------------------
# symbolic corpus


def _corpus_expr(label: str, xs):
    s = sum(xs)
    r2 = sum(x ** 2 for x in xs)
    x0, xl = xs[0], xs[-1]
    if label == "poly2":
        return r2
    if label == "poly3":
        return x0 ** 3 - 2 * x0 * xl + 1
    if label == "poly5":
        return s ** 5 / 5 - 3 * x0 * xl ** 2 + xl
    if label == "sin":
        return sp.sin(sp.pi * s)
    if label == "exp":
        return sp.exp(s)
    if label == "runge":
        return 1 / (1 + 25 * r2)
    raise KeyError(label)


def _lambdify(expr, xs) -> Func:
    f = sp.lambdify(xs, expr, modules="numpy")
    if not expr.free_symbols:
        c = float(expr)
        return lambda X: np.full(X.shape[0], c)
    return lambda X: np.asarray(f(*X.T), dtype=float)


@lru_cache(maxsize=None)
def _symbolic_tables(label: str, dim: int, m_max: int):
    xs = sp.symbols(f"x0:{dim}")
    expr = _corpus_expr(label, list(xs))
    table = {}
    for alpha in indices_upto(dim, m_max):
        if alpha.order() == 0:
            continue
        spec = [(x, a) for x, a in zip(xs, alpha) if a]
        table[alpha] = _lambdify(sp.diff(expr, *spec), xs)
    return _lambdify(expr, xs), table


def corpus_field(label: str, dim: int, m_max: int = 4) -> DifferentiableField:
    """Built-in test function with exact derivatives through `m_max`.

    Labels: ``poly2`` (|x|^2), ``poly3``, ``poly5``, ``sin`` (sin(pi sum x)),
    ``exp`` (exp(sum x)) and ``runge`` (1 / (1 + 25 |x|^2)).
    """
    if label not in CORPUS:
        raise KeyError(f"unknown corpus label {label!r}; choose from {', '.join(CORPUS)}")
    func, table = _symbolic_tables(label, dim, m_max)
    return DifferentiableField(dim, func, table, m_max, label)


_VARS = "xyzw"


def _parse_monomials(text: str, dim: int) -> Polynomial:
    coeffs: dict[tuple, float] = {}
    for term in re.split(r"(?=[-+])", text.replace(" ", "")):
        if term in ("", "+", "-"):
            continue
        coef = -1.0 if term[0] == "-" else 1.0
        exps = [0] * dim
        for factor in term.lstrip("+-").split("*"):
            var, _, e = factor.partition("^")
            if var in _VARS[:dim]:
                exps[_VARS.index(var)] += int(e or 1)
            else:
                try:
                    coef *= float(factor)
                except ValueError:
                    raise ValueError(f"cannot read factor {factor!r} in {text!r}") from None
        coeffs[tuple(exps)] = coeffs.get(tuple(exps), 0.0) + coef
    degree = max((sum(e) for e in coeffs), default=0)
    return Polynomial(dim, degree, coeffs)


def parse_field(text: str, dim: int, m_max: int = 4) -> DifferentiableField:
    """Field from a corpus label or a ``poly:`` monomial-sum tag.

    ``poly:x^2*y+3*x-1`` uses variables ``x, y, z, w`` in that order.
    """
    text = text.strip()
    if text.startswith("poly:"):
        body = text[5:]
        return polynomial_field(_parse_monomials(body, dim), max(m_max, 8), text)
    return corpus_field(text, dim, m_max)
