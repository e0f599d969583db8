"""Multivariate polynomials of bounded total degree.

Polynomials are stored as a map from :class:`MultiIndex` to coefficient in
the monomial basis about the origin.  Evaluation is exact in the
coefficients; nothing is sampled.
"""

from __future__ import annotations

import itertools
import math
from typing import Callable, Mapping

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DimensionMismatchError, IllConditionedBasisError
from .multiindex import MultiIndex, enumerate_indices, indices_upto

__all__ = ["Polynomial", "l2_project", "seminorm_project", "scaled_monomial_matrix"]

# relative pivot floor in the Gram-Schmidt sweep
PIVOT_TOL = 1e-12


class Polynomial:
    """Polynomial in `dim` variables with total degree at most `degree_bound`."""

    __slots__ = ("dim", "degree_bound", "coeffs")

    def __init__(self, dim: int, degree_bound: int, coeffs: Mapping | None = None):
        self.dim = int(dim)
        self.degree_bound = int(degree_bound)
        clean: dict[MultiIndex, float] = {}
        for alpha, c in (coeffs or {}).items():
            alpha = MultiIndex(alpha)
            if len(alpha) != self.dim:
                raise DimensionMismatchError(
                    f"coefficient key {tuple(alpha)} in a {self.dim}-variate polynomial")
            if alpha.order() > self.degree_bound:
                if c != 0:
                    raise ValueError(
                        f"term {tuple(alpha)} exceeds degree bound {self.degree_bound}")
                continue
            clean[alpha] = clean.get(alpha, 0.0) + float(c)
        self.coeffs = clean

    # construction helpers

    @classmethod
    def zero(cls, dim: int, degree_bound: int = 0) -> "Polynomial":
        return cls(dim, degree_bound)

    @classmethod
    def constant(cls, dim: int, value: float) -> "Polynomial":
        return cls(dim, 0, {MultiIndex.zero(dim): value})

    @classmethod
    def from_local(cls, dim: int, degree_bound: int, coeffs: Mapping,
                   center) -> "Polynomial":
        """Polynomial given by ``sum c_a (x - center)^a``, re-expanded about 0.

        The re-expansion is the exact binomial one.
        """
        center = np.asarray(center, dtype=float).reshape(dim)
        out: dict[MultiIndex, float] = {}
        for alpha, c in coeffs.items():
            if c == 0:
                continue
            ranges = [range(a + 1) for a in alpha]
            for beta in itertools.product(*ranges):
                term = float(c)
                for a, b, ci in zip(alpha, beta, center):
                    if a - b:
                        term *= math.comb(a, b) * (-ci) ** (a - b)
                key = MultiIndex(beta)
                out[key] = out.get(key, 0.0) + term
        return cls(dim, degree_bound, out)

    # basic queries

    def degree(self) -> int:
        """Actual degree (-1 for the zero polynomial)."""
        orders = [a.order() for a, c in self.coeffs.items() if c != 0]
        return max(orders, default=-1)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs.values())

    def coeff(self, alpha) -> float:
        return self.coeffs.get(MultiIndex(alpha), 0.0)

    def coefficient_vector(self, basis=None) -> np.ndarray:
        """Coefficients listed along `basis` (graded order up to the degree bound)."""
        if basis is None:
            basis = indices_upto(self.dim, self.degree_bound)
        return np.array([self.coeff(a) for a in basis])

    def max_coeff_diff(self, other: "Polynomial") -> float:
        keys = set(self.coeffs) | set(other.coeffs)
        return max((abs(self.coeff(k) - other.coeff(k)) for k in keys), default=0.0)

    # evaluation

    def __call__(self, x) -> float | np.ndarray:
        return self.eval(x)

    def eval(self, x) -> float | np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise DimensionMismatchError(
                f"{self.dim}-variate polynomial evaluated at a point of length {x.shape[-1]}")
        single = x.ndim == 1
        X = x.reshape(-1, self.dim)
        out = np.zeros(X.shape[0])
        if self.coeffs:
            top = max(a.order() for a in self.coeffs)
            powers = [np.vander(X[:, i], top + 1, increasing=True) for i in range(self.dim)]
            for alpha, c in self.coeffs.items():
                if c == 0:
                    continue
                term = np.full(X.shape[0], c)
                for i, a in enumerate(alpha):
                    if a:
                        term *= powers[i][:, a]
                out += term
        return float(out[0]) if single else out

    # calculus and algebra

    def derivative(self, alpha) -> "Polynomial":
        alpha = MultiIndex(alpha)
        if len(alpha) != self.dim:
            raise DimensionMismatchError(f"derivative {tuple(alpha)} of {self.dim}-variate polynomial")
        new_bound = max(self.degree_bound - alpha.order(), 0)
        out: dict[MultiIndex, float] = {}
        for beta, c in self.coeffs.items():
            if not alpha.dominated_by(beta):
                continue
            factor = 1
            for a, b in zip(alpha, beta):
                factor *= math.perm(b, a)
            out[beta - alpha] = c * factor
        return Polynomial(self.dim, new_bound, out)

    def dilate(self, scale: float) -> "Polynomial":
        """The polynomial ``x -> p(x / scale)``."""
        return Polynomial(self.dim, self.degree_bound,
                          {a: c * scale ** (-a.order()) for a, c in self.coeffs.items()})

    def translate(self, shift) -> "Polynomial":
        """The polynomial ``x -> p(x - shift)``."""
        return Polynomial.from_local(self.dim, self.degree_bound, self.coeffs, shift)

    def _check(self, other: "Polynomial"):
        if other.dim != self.dim:
            raise DimensionMismatchError(f"{self.dim} vs {other.dim} variables")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        out = dict(self.coeffs)
        for a, c in other.coeffs.items():
            out[a] = out.get(a, 0.0) + c
        return Polynomial(self.dim, max(self.degree_bound, other.degree_bound), out)

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return Polynomial(self.dim, self.degree_bound,
                          {a: c * scalar for a, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __repr__(self):
        terms = ", ".join(f"{tuple(a)}: {c:.6g}" for a, c in sorted(self.coeffs.items()) if c)
        return f"Polynomial(dim={self.dim}, deg<={self.degree_bound}, {{{terms}}})"


def scaled_monomial_matrix(nodes: np.ndarray, degree: int, center, scale: float):
    """Rows: nodes; columns: ``((x - center) / scale)^a`` for ``|a| <= degree``."""
    nodes = np.asarray(nodes, dtype=float)
    basis = indices_upto(nodes.shape[1], degree)
    Z = (nodes - np.asarray(center)) / scale
    cols = [np.asarray(np.broadcast_to(_pow(a, Z), (len(Z),))) for a in basis]
    return np.column_stack(cols), basis


def _pow(alpha, Z):
    out = np.ones(Z.shape[0])
    for i, a in enumerate(alpha):
        if a:
            out = out * Z[:, i] ** a
    return out


def _orthonormalize(A: np.ndarray):
    """Modified Gram-Schmidt with one reorthogonalization pass.

    Returns ``Q, R`` with ``A = Q R``; raises when a column collapses.
    """
    N, M = A.shape
    Q = A.copy()
    R = np.zeros((M, M))
    for j in range(M):
        v = Q[:, j]
        original = np.linalg.norm(A[:, j])
        for _ in range(2):
            for i in range(j):
                r = Q[:, i] @ v
                R[i, j] += r
                v = v - r * Q[:, i]
        nrm = np.linalg.norm(v)
        if original == 0 or nrm < PIVOT_TOL * original:
            raise IllConditionedBasisError(
                f"basis column {j} is numerically dependent (relative pivot "
                f"{nrm / original if original else 0.0:.3e}); degenerate quadrature or domain?")
        R[j, j] = nrm
        Q[:, j] = v / nrm
    return Q, R


def _frame(nodes: np.ndarray):
    lo, hi = nodes.min(axis=0), nodes.max(axis=0)
    center = 0.5 * (lo + hi)
    scale = max(float(np.max(hi - lo)) / 2.0, np.finfo(float).tiny)
    return center, scale


def _to_polynomial(dim, degree, basis, local, center, scale) -> Polynomial:
    coeffs = {a: c * scale ** (-a.order()) for a, c in zip(basis, local)}
    return Polynomial.from_local(dim, degree, coeffs, center)


def l2_project(u: Callable, domain, degree: int, quad) -> Polynomial:
    """Best approximation of `u` in total degree `degree` for the discrete L2 product.

    Parameters
    ----------
    u : callable
        Maps an ``(N, n)`` array of points to ``(N,)`` values.
    domain : Domain
        Used only for its dimension; the inner product lives on `quad`.
    degree : int
        Total degree bound of the result.
    quad : QuadratureRule
        Nodes and positive weights realizing ``(f, g) = sum w f g``.

    Returns
    -------
    Polynomial
        The minimizer of ``sum w (u - v)^2`` over polynomials `v` of total
        degree at most `degree`, in monomials about the origin.
    """
    if degree < 0:
        raise ValueError("degree must be >= 0")
    nodes, weights = quad.nodes, quad.weights
    if nodes.shape[1] != domain.dim:
        raise DimensionMismatchError("quadrature and domain dimensions differ")
    center, scale = _frame(nodes)
    Phi, basis = scaled_monomial_matrix(nodes, degree, center, scale)
    sw = np.sqrt(weights)
    Q, R = _orthonormalize(Phi * sw[:, None])
    rhs = Q.T @ (sw * np.asarray(u(nodes), dtype=float))
    local = solve_triangular(R, rhs)
    return _to_polynomial(domain.dim, degree, basis, local, center, scale)


def seminorm_project(u, domain, degree: int, k: int, quad) -> Polynomial:
    """Best approximation for the discrete order-`k` L2 seminorm.

    Minimizes ``sum_{|a|=k} sum_i w_i (D^a u - D^a v)(x_i)^2`` over `v` of
    total degree at most `degree`.  That seminorm does not see the part of
    `v` below degree `k`; it is fixed by the plain L2 projection of what
    remains.  ``k = 0`` is :func:`l2_project`.  `u` must offer
    ``u.deriv(alpha)`` returning a vectorized callable.
    """
    if k == 0 or k > degree:
        # above the degree every order-k derivative of v vanishes
        v = l2_project(u, domain, degree, quad)
        return v if k == 0 else Polynomial(v.dim, degree, v.coeffs)
    nodes, weights = quad.nodes, quad.weights
    n = nodes.shape[1]
    center, scale = _frame(nodes)
    Z = (nodes - center) / scale
    sw = np.sqrt(weights)
    high = [b for b in indices_upto(n, degree) if b.order() >= k]
    rows, rhs = [], []
    for alpha in enumerate_indices(n, k):
        cols = []
        for beta in high:
            if alpha.dominated_by(beta):
                factor = math.prod(math.perm(b, a) for a, b in zip(alpha, beta)) * scale ** (-k)
                cols.append(factor * _pow(beta - alpha, Z))
            else:
                cols.append(np.zeros(len(Z)))
        rows.append(np.column_stack(cols) * sw[:, None])
        rhs.append(sw * np.broadcast_to(np.asarray(u.deriv(alpha)(nodes), dtype=float), sw.shape))
    Q, R = _orthonormalize(np.vstack(rows))
    local_high = solve_triangular(R, Q.T @ np.concatenate(rhs))
    v_high = _to_polynomial(n, degree, high, local_high, center, scale)
    rest = l2_project(lambda X: np.asarray(u(X), dtype=float) - v_high(X), domain, k - 1, quad)
    return v_high + Polynomial(n, degree, rest.coeffs)
