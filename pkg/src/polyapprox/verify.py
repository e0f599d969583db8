"""Empirical checks of polynomial approximation bounds in Sobolev seminorms.

The central quantity is the ratio

    |u - v|_{k,p} / (d^(m-k) |u|_{m,p})

for a polynomial ``v`` of degree below ``m`` built from ``u`` either as the
averaged Taylor polynomial over the domain's star ball or as the discrete
L2 projection.  Sweeping it over functions, orders and exponents gives an
empirical lower bound ``c_hat`` for the best constant, bucketed by
``(m, n, gamma)``.  ``c_hat`` is never the sharp constant.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from .domain import Interval, QuadSpec, chunkiness, quadrature
from .errors import HypothesisViolatedError, NotStarShapedError
from .field import (
    DifferentiableField,
    deriv,
    parse_field,
    polynomial_field,
    sobolev_norm,
    sobolev_seminorm,
)
from .multiindex import MultiIndex, indices_upto
from .polyspace import Polynomial, l2_project, seminorm_project
from .taylor import averaged_taylor, mollifier

log = logging.getLogger(__name__)

__all__ = [
    "BoundQuery", "BoundReport", "ConstantEstimate", "FunctionalReport", "LinearFunctional",
    "bound_check", "bound_reports", "interp1d_check", "dilation_sweep", "constant_sweep",
    "estimate_constants", "functional_check", "midpoint_error", "mean_minus_point",
    "point_evaluation", "METHODS", "INTERP_CONSTANT",
]

METHODS = ("averaged-taylor", "l2-projection")
_ALIASES = {"taylor": "averaged-taylor", "at": "averaged-taylor", "averaged-taylor": "averaged-taylor",
            "l2": "l2-projection", "l2-projection": "l2-projection", "projection": "l2-projection"}

DEGENERATE_RHS = 1e-12
INTERP_CONSTANT = 0.125
INTERP_TOL = 1e-6
ANNIHILATION_TOL = 1e-8


def canonical_method(name: str) -> str:
    try:
        return _ALIASES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown method {name!r}; choose from {', '.join(METHODS)}") from None


@dataclass(frozen=True)
class BoundQuery:
    field: DifferentiableField
    domain: object
    m: int
    k: int
    p: float
    method: str = "averaged-taylor"

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if not 0 <= self.k <= self.m:
            raise ValueError(f"need 0 <= k <= m, got k={self.k}, m={self.m}")
        object.__setattr__(self, "method", canonical_method(self.method))
        object.__setattr__(self, "p", float(self.p))


@dataclass(frozen=True)
class BoundReport:
    domain: str
    gamma: float
    field: str
    m: int
    k: int
    p: float
    method: str
    lhs: float
    rhs_seminorm: float
    d: float
    rhs: float
    ratio: Optional[float]

    @property
    def degenerate(self) -> bool:
        return self.ratio is None


@dataclass(frozen=True)
class ConstantEstimate:
    method: str
    m: int
    n: int
    gamma_bucket: float
    c_hat: float
    witness: tuple  # (domain, field, k, p)
    count: int


def _make_report(domain, gamma, label, m, k, p, method, lhs, semi, d) -> BoundReport:
    rhs = d ** (m - k) * semi
    ratio = lhs / rhs if rhs > DEGENERATE_RHS else None
    return BoundReport(domain.tag(), float(gamma), label, m, k, float(p), method,
                       float(lhs), float(semi), float(d), float(rhs), ratio)


def _gamma_or_nan(domain) -> float:
    try:
        return chunkiness(domain).gamma
    except NotStarShapedError:
        return math.nan


def approximant(u: DifferentiableField, domain, m: int, method: str, quad,
                chunk=None) -> Polynomial:
    """The degree ``m - 1`` polynomial that `method` associates with `u`."""
    method = canonical_method(method)
    if method == "l2-projection":
        return l2_project(u, domain, m - 1, quad)
    chunk = chunk or chunkiness(domain)
    B = mollifier(chunk.center, chunk.radius)
    return averaged_taylor(u, B, m)


def bound_reports(u: DifferentiableField, domain, m: int, ks: Iterable[int], ps: Iterable[float],
                  method: str, quad, chunk=None, probe: int = 64) -> list[BoundReport]:
    """Reports for every ``(k, p)`` sharing one approximant and one quadrature."""
    method = canonical_method(method)
    if chunk is None:
        chunk = chunkiness(domain) if method == "averaged-taylor" else None
    gamma = chunk.gamma if chunk is not None else _gamma_or_nan(domain)
    ks = list(ks)
    if method == "averaged-taylor":
        v = approximant(u, domain, m, method, quad, chunk)
        errs = {k: u - v for k in ks}
    else:
        errs = {k: u - seminorm_project(u, domain, m - 1, k, quad) for k in ks}
    d = domain.diameter()
    out = []
    for p in ps:
        semi = sobolev_seminorm(u, domain, m, p, quad, probe).value
        for k in ks:
            lhs = sobolev_seminorm(errs[k], domain, k, p, quad, probe).value
            out.append(_make_report(domain, gamma, u.label, m, k, p, method, lhs, semi, d))
    return out


def bound_check(q: BoundQuery, quad_spec: QuadSpec = QuadSpec(), quad=None) -> BoundReport:
    """One side-by-side evaluation of ``|u - v|_{k,p}`` and ``d^(m-k) |u|_{m,p}``."""
    quad = quad or quadrature(q.domain, quad_spec)
    return bound_reports(q.field, q.domain, q.m, [q.k], [q.p], q.method, quad)[0]


def interp1d_check(u: DifferentiableField, interval: Interval, grid: int = 10001) -> BoundReport:
    """Linear interpolation error against ``(b - a)^2 sup |u''|`` on a dense grid.

    The classical bound gives a ratio of at most 1/8, attained by quadratics.
    """
    a, b = interval.a, interval.b
    x = np.linspace(a, b, grid)[:, None]
    ua, ub = u(np.array([a])), u(np.array([b]))
    interp = ua + (ub - ua) * (x[:, 0] - a) / (b - a)
    lhs = float(np.max(np.abs(u(x) - interp)))
    sup2 = float(np.max(np.abs(deriv(u, (2,))(x))))
    L = b - a
    return _make_report(interval, 1.0, u.label, 2, 0, math.inf, "linear-interpolant",
                        lhs, sup2, L)


def dilation_sweep(q: BoundQuery, scales: Sequence[float],
                   quad_spec: QuadSpec = QuadSpec()) -> list[BoundReport]:
    """Rerun `q` on ``lam * domain`` with ``u(x / lam)`` for each scale.

    The star ball and the quadrature are rebuilt on the dilated domain, so
    they dilate together with it.
    """
    out = []
    for lam in scales:
        dom = q.domain.scaled(float(lam))
        u = q.field.dilate(float(lam))
        out.append(bound_check(BoundQuery(u, dom, q.m, q.k, q.p, q.method), quad_spec))
    return out


# -------------------------------------------------------------------------
# constant sweep


@lru_cache(maxsize=32)
def _cached_quadrature(domain, spec: QuadSpec):
    return quadrature(domain, spec)


def _domain_seed(seed: Optional[int], index: int) -> Optional[int]:
    if seed is None:
        return None
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


@dataclass(frozen=True)
class _Task:
    domain_index: int
    domain: object
    chunk: object
    field: str
    m: int
    method: str
    ps: tuple
    spec: QuadSpec
    m_max: int


def _run_task(task: _Task) -> list[BoundReport]:
    u = parse_field(task.field, task.domain.dim, task.m_max)
    quad = _cached_quadrature(task.domain, task.spec)
    chunk = task.chunk if task.method == "averaged-taylor" else None
    reports = bound_reports(u, task.domain, task.m, range(task.m + 1), task.ps, task.method,
                            quad, chunk)
    if chunk is None:
        gamma = task.chunk.gamma if task.chunk is not None else math.nan
        reports = [_replace_gamma(r, gamma) for r in reports]
    return reports


def _replace_gamma(r: BoundReport, gamma: float) -> BoundReport:
    return BoundReport(**{**r.__dict__, "gamma": float(gamma)})


def gamma_bucket(gamma: float) -> float:
    return round(gamma, 1)


def estimate_constants(reports: Iterable[BoundReport], n_of: dict) -> list[ConstantEstimate]:
    """Bucket maxima of the non-degenerate ratios.

    `n_of` maps a domain tag to its dimension.  Ties keep the first witness
    in report order, which is fixed by the sweep.
    """
    best: dict[tuple, list] = {}
    for r in reports:
        if r.ratio is None:
            continue
        key = (r.method, r.m, n_of[r.domain], gamma_bucket(r.gamma))
        slot = best.get(key)
        if slot is None:
            best[key] = [r.ratio, (r.domain, r.field, r.k, r.p), 1]
        else:
            slot[2] += 1
            if r.ratio > slot[0]:
                slot[0], slot[1] = r.ratio, (r.domain, r.field, r.k, r.p)
    return [ConstantEstimate(key[0], key[1], key[2], key[3], v[0], v[1], v[2])
            for key, v in sorted(best.items())]


def constant_sweep(fields: Sequence[str], domains: Sequence, ms: Sequence[int] = (1, 2, 3),
                   ps: Sequence[float] = (1.0, 2.0, math.inf), methods: Sequence[str] = METHODS,
                   quad_spec: QuadSpec = QuadSpec(), seed: Optional[int] = None,
                   workers: int = 1) -> tuple[list[BoundReport], list[ConstantEstimate]]:
    """Bound checks over the full grid, then the per-bucket ``c_hat`` table.

    Each domain gets its own Monte-Carlo seed derived from ``(seed, index)``,
    so results do not depend on `workers`.
    """
    seed = quad_spec.seed if seed is None else seed
    methods = [canonical_method(m) for m in methods]
    ps = tuple(float(p) for p in ps)
    m_max = max(ms)
    tasks = []
    for i, dom in enumerate(domains):
        try:
            chunk = chunkiness(dom)
        except NotStarShapedError:
            chunk = None
        spec = QuadSpec(quad_spec.scheme, quad_spec.order, quad_spec.mc_samples,
                        _domain_seed(seed, i))
        for label in fields:
            for m in ms:
                for method in methods:
                    if method == "averaged-taylor" and chunk is None:
                        raise NotStarShapedError(f"{dom.tag()} has no star ball")
                    tasks.append(_Task(i, dom, chunk, label, m, method, ps, spec, m_max))
    log.info("constant sweep: %d tasks on %d worker(s)", len(tasks), workers)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_task, tasks))
    else:
        chunks = [_run_task(t) for t in tasks]
    reports = [r for c in chunks for r in c]
    n_of = {d.tag(): d.dim for d in domains}
    return reports, estimate_constants(reports, n_of)


# -------------------------------------------------------------------------
# linear functionals


@dataclass(frozen=True)
class LinearFunctional:
    """``l(u) = sum c_j u(x_j) + a * integral(u)``, the integral by quadrature."""

    name: str
    points: tuple = ()      # ((coef, point), ...)
    integral_coef: float = 0.0

    def __call__(self, u: DifferentiableField, quad) -> float:
        total = 0.0
        if self.integral_coef:
            total += self.integral_coef * quad.integrate(u(quad.nodes))
        for c, x in self.points:
            total += c * u(np.asarray(x, dtype=float))
        return float(total)


def _barycenter(quad) -> np.ndarray:
    return (quad.weights @ quad.nodes) / quad.total_weight()


def midpoint_error(domain, quad) -> LinearFunctional:
    """``integral(u) - |domain| u(barycenter)``; volume and barycenter taken from `quad`."""
    vol = quad.total_weight()
    return LinearFunctional("midpoint-error", ((-vol, tuple(_barycenter(quad))),), 1.0)


def mean_minus_point(domain, quad, x0=None) -> LinearFunctional:
    """Mean value minus a point value (at the barycenter unless `x0` is given)."""
    x0 = _barycenter(quad) if x0 is None else np.ravel(np.asarray(x0, dtype=float))
    return LinearFunctional("mean-minus-point", ((-1.0, tuple(x0)),), 1.0 / quad.total_weight())


def point_evaluation(x0) -> LinearFunctional:
    return LinearFunctional("point-evaluation", ((1.0, tuple(np.ravel(x0))),), 0.0)


@dataclass(frozen=True)
class FunctionalReport:
    functional: str
    domain: str
    gamma: float
    m: int
    p: float
    annihilation_residual: float
    values: dict = field(default_factory=dict)   # field label -> l(u)
    ratios: dict = field(default_factory=dict)   # field label -> |l(u)| / |u|_{m,p}
    sup_ratio: float = 0.0
    dual_norm_lower_bound: float = 0.0


def functional_check(ell: LinearFunctional, fields: Sequence[DifferentiableField], domain,
                     m: int, p: float, quad_spec: QuadSpec = QuadSpec(), quad=None,
                     tol: float = ANNIHILATION_TOL) -> FunctionalReport:
    """Check that `ell` vanishes on polynomials of degree below `m`, then bound it.

    The annihilation test runs over scaled monomials ``((x - c) / d)^a``.
    The dual-norm figure is ``max |l(u)| / ||u||_{m,p}`` over `fields`, a
    lower bound for the true dual norm and nothing more.
    """
    quad = quad or quadrature(domain, quad_spec)
    p = float(p)
    c, d = domain.centroid(), domain.diameter()
    residual = 0.0
    for alpha in indices_upto(domain.dim, m - 1):
        mono = Polynomial.from_local(domain.dim, alpha.order(), {alpha: d ** -alpha.order()}, c)
        residual = max(residual, abs(ell(polynomial_field(mono, m), quad)))
    if residual > tol:
        raise HypothesisViolatedError(
            f"{ell.name} does not vanish on polynomials of degree < {m} "
            f"(residual {residual:.3e} > {tol:g})")
    values, ratios = {}, {}
    dual = 0.0
    for u in fields:
        val = ell(u, quad)
        values[u.label] = val
        semi = sobolev_seminorm(u, domain, m, p, quad).value
        if semi > DEGENERATE_RHS:
            ratios[u.label] = abs(val) / semi
        norm = sobolev_norm(u, domain, m, p, quad)
        if norm > 0:
            dual = max(dual, abs(val) / norm)
    return FunctionalReport(ell.name, domain.tag(), _gamma_or_nan(domain), m, p, residual,
                            values, ratios, max(ratios.values(), default=0.0), dual)
