"""Bounded domains, their quadrature rules, and chunkiness.

Five shapes are supported: :class:`Interval`, :class:`Box`, :class:`Ball`,
:class:`ConvexPolytope` and the non-convex :class:`PacmanSector` (a disk
with a wedge cut out, star-shaped but not convex).  All are frozen
dataclasses so they hash, pickle and compare by value.

Chunkiness is ``gamma = d / rho_max`` where ``rho_max`` is the largest
diameter of a ball ``B`` such that the convex hull of ``{x} u B`` stays in
the domain for every point ``x`` of it.  For convex shapes every inscribed
ball qualifies, so ``rho_max`` is the inscribed-ball diameter and is exact.
For the sector it comes from a discrete search and is a lower bound.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Mapping, Optional

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull
from scipy.spatial.distance import pdist

from .errors import (
    DegenerateDomainError,
    DimensionMismatchError,
    InvalidDimensionError,
    InvalidScaleError,
    NotStarShapedError,
)

__all__ = [
    "Interval", "Box", "Ball", "ConvexPolytope", "PacmanSector",
    "QuadSpec", "QuadratureRule", "ChunkinessReport",
    "quadrature", "ball_quadrature", "chunkiness", "search_star_ball",
    "validate_star_ball", "dilate", "translate", "parse_domain", "domain_from_mapping",
]

# relative slack for closed-set membership tests
MEMBERSHIP_TOL = 1e-12
MC_BATCH = 8192


def _t(v: float) -> str:
    """Shortest exact text for a float in a domain tag."""
    text = repr(float(v))
    return text[:-2] if text.endswith(".0") else text


def _angle_tag(v: float) -> str:
    frac = Fraction(v / math.pi).limit_denominator(24)
    if frac and abs(float(frac) * math.pi - v) <= 1e-14 * max(1.0, v):
        num = "" if frac.numerator == 1 else f"{frac.numerator}*"
        return f"{num}pi" + ("" if frac.denominator == 1 else f"/{frac.denominator}")
    return _t(v)


def _as_points(x, dim: int) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (dim,):
        raise DimensionMismatchError(f"expected points of length {dim}, got shape {x.shape}")
    return x.reshape(-1, dim), x.ndim == 1


class _Shape:
    """Mixin with the behaviour shared by every domain."""

    dim: int

    def contains(self, x):
        X, single = _as_points(x, self.dim)
        inside = self._contains(X)
        return bool(inside[0]) if single else inside

    def diameter(self) -> float:
        raise NotImplementedError

    def probe_grid(self, per_axis: int = 64) -> np.ndarray:
        """Uniform tensor grid over the bounding box, restricted to the domain."""
        lo, hi = self.bbox()
        axes = [np.linspace(l, h, per_axis) for l, h in zip(lo, hi)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.dim)
        return grid[self._contains(grid)]

    def tag(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Interval(_Shape):
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"interval needs a < b, got ({self.a}, {self.b})")

    dim = 1

    def bbox(self):
        return np.array([self.a]), np.array([self.b])

    def _contains(self, X):
        tol = MEMBERSHIP_TOL * max(1.0, abs(self.a), abs(self.b))
        return (X[:, 0] >= self.a - tol) & (X[:, 0] <= self.b + tol)

    def diameter(self) -> float:
        return self.b - self.a

    def volume(self) -> float:
        return self.b - self.a

    def centroid(self) -> np.ndarray:
        return np.array([0.5 * (self.a + self.b)])

    def boundary_samples(self, count: int, rng) -> np.ndarray:
        return rng.choice([self.a, self.b], size=count)[:, None]

    def corner_points(self) -> np.ndarray:
        return np.array([[self.a], [self.b]])

    def scaled(self, lam: float) -> "Interval":
        return Interval(self.a * lam, self.b * lam)

    def shifted(self, t) -> "Interval":
        t = float(np.ravel(t)[0])
        return Interval(self.a + t, self.b + t)

    def tag(self) -> str:
        return f"interval:{_t(self.a)},{_t(self.b)}"


@dataclass(frozen=True)
class Box(_Shape):
    lo: tuple
    hi: tuple

    def __post_init__(self):
        object.__setattr__(self, "lo", tuple(float(v) for v in self.lo))
        object.__setattr__(self, "hi", tuple(float(v) for v in self.hi))
        if len(self.lo) != len(self.hi) or not self.lo:
            raise InvalidDimensionError("box corners must have equal, positive length")
        if any(l >= h for l, h in zip(self.lo, self.hi)):
            raise ValueError(f"box needs lo < hi componentwise, got {self.lo}, {self.hi}")

    @property
    def dim(self) -> int:
        return len(self.lo)

    def bbox(self):
        return np.array(self.lo), np.array(self.hi)

    def _contains(self, X):
        lo, hi = self.bbox()
        tol = MEMBERSHIP_TOL * max(1.0, np.max(np.abs(lo)), np.max(np.abs(hi)))
        return np.all((X >= lo - tol) & (X <= hi + tol), axis=1)

    def diameter(self) -> float:
        lo, hi = self.bbox()
        return float(np.linalg.norm(hi - lo))

    def volume(self) -> float:
        lo, hi = self.bbox()
        return float(np.prod(hi - lo))

    def centroid(self) -> np.ndarray:
        lo, hi = self.bbox()
        return 0.5 * (lo + hi)

    def boundary_samples(self, count: int, rng) -> np.ndarray:
        lo, hi = self.bbox()
        side = hi - lo
        # face area for the pair of faces normal to each axis
        areas = np.array([np.prod(np.delete(side, i)) for i in range(self.dim)])
        axis = rng.choice(self.dim, size=count, p=areas / areas.sum())
        pts = lo + side * rng.random((count, self.dim))
        upper = rng.random(count) < 0.5
        pts[np.arange(count), axis] = np.where(upper, hi[axis], lo[axis])
        return pts

    def corner_points(self) -> np.ndarray:
        lo, hi = self.bbox()
        corners = np.stack(np.meshgrid(*zip(lo, hi), indexing="ij"), axis=-1)
        return corners.reshape(-1, self.dim)

    def scaled(self, lam: float) -> "Box":
        return Box(tuple(v * lam for v in self.lo), tuple(v * lam for v in self.hi))

    def shifted(self, t) -> "Box":
        t = np.ravel(t)
        return Box(tuple(self.lo + t), tuple(self.hi + t))

    def tag(self) -> str:
        return "box:" + ",".join(_t(v) for v in self.lo + self.hi)


def _ball_volume(n: int, r: float) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1) * r ** n


def _sphere_directions(n: int, count: int) -> np.ndarray:
    """Deterministic, roughly uniform unit vectors."""
    if n == 1:
        return np.array([[-1.0], [1.0]])
    if n == 2:
        th = 2 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(th), np.sin(th)])
    if n == 3:
        i = np.arange(count) + 0.5
        z = 1 - 2 * i / count
        phi = np.pi * (1 + 5 ** 0.5) * i
        s = np.sqrt(1 - z * z)
        return np.column_stack([s * np.cos(phi), s * np.sin(phi), z])
    g = np.random.default_rng(0).standard_normal((count, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


@dataclass(frozen=True)
class Ball(_Shape):
    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(v) for v in np.ravel(self.center)))
        if not self.center:
            raise InvalidDimensionError("ball center must have length >= 1")
        if not self.radius > 0:
            raise ValueError(f"ball radius must be positive, got {self.radius}")

    @property
    def dim(self) -> int:
        return len(self.center)

    def bbox(self):
        c = np.array(self.center)
        return c - self.radius, c + self.radius

    def _contains(self, X):
        d = np.linalg.norm(X - np.array(self.center), axis=1)
        return d <= self.radius * (1 + MEMBERSHIP_TOL) + MEMBERSHIP_TOL

    def diameter(self) -> float:
        return 2.0 * self.radius

    def volume(self) -> float:
        return _ball_volume(self.dim, self.radius)

    def centroid(self) -> np.ndarray:
        return np.array(self.center)

    def boundary_samples(self, count: int, rng) -> np.ndarray:
        g = rng.standard_normal((count, self.dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        return np.array(self.center) + self.radius * g

    def corner_points(self) -> np.ndarray:
        return np.empty((0, self.dim))

    def scaled(self, lam: float) -> "Ball":
        return Ball(tuple(np.array(self.center) * lam), self.radius * lam)

    def shifted(self, t) -> "Ball":
        return Ball(tuple(np.array(self.center) + np.ravel(t)), self.radius)

    def tag(self) -> str:
        return "ball:" + ",".join(_t(v) for v in self.center) + f",{_t(self.radius)}"


@dataclass(frozen=True)
class ConvexPolytope(_Shape):
    vertices: tuple

    def __post_init__(self):
        verts = tuple(tuple(float(v) for v in row) for row in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts[0]) < 2:
            raise InvalidDimensionError("use Interval for one-dimensional polytopes")

    @property
    def dim(self) -> int:
        return len(self.vertices[0])

    @cached_property
    def _hull(self) -> ConvexHull:
        return ConvexHull(np.array(self.vertices))

    def bbox(self):
        V = np.array(self.vertices)
        return V.min(axis=0), V.max(axis=0)

    def _contains(self, X):
        eq = self._hull.equations
        scale = max(1.0, float(np.max(np.abs(self.vertices))))
        return np.all(X @ eq[:, :-1].T + eq[:, -1] <= MEMBERSHIP_TOL * scale, axis=1)

    def diameter(self) -> float:
        return float(pdist(np.array(self.vertices)).max())

    def volume(self) -> float:
        return float(self._hull.volume)

    def centroid(self) -> np.ndarray:
        return np.array(self.vertices)[self._hull.vertices].mean(axis=0)

    def boundary_samples(self, count: int, rng) -> np.ndarray:
        V = np.array(self.vertices)
        simplices = V[self._hull.simplices]  # (F, n, n)
        edges = simplices[:, 1:] - simplices[:, :1]
        gram = np.einsum("fij,fkj->fik", edges, edges)
        areas = np.sqrt(np.abs(np.linalg.det(gram)))
        face = rng.choice(len(simplices), size=count, p=areas / areas.sum())
        bary = rng.dirichlet(np.ones(self.dim), size=count)
        return np.einsum("ci,cij->cj", bary, simplices[face])

    def corner_points(self) -> np.ndarray:
        return np.array(self.vertices)[self._hull.vertices]

    def scaled(self, lam: float) -> "ConvexPolytope":
        return ConvexPolytope(tuple(tuple(np.array(v) * lam) for v in self.vertices))

    def shifted(self, t) -> "ConvexPolytope":
        t = np.ravel(t)
        return ConvexPolytope(tuple(tuple(np.array(v) + t) for v in self.vertices))

    def tag(self) -> str:
        return "polytope:" + ";".join(",".join(_t(c) for c in v) for v in self.vertices)


@dataclass(frozen=True)
class PacmanSector(_Shape):
    """Closed disk with the open wedge ``|angle| < removed_angle / 2`` removed.

    The mouth opens towards the positive x axis.
    """

    center: tuple
    radius: float
    removed_angle: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(v) for v in np.ravel(self.center)))
        if len(self.center) != 2:
            raise InvalidDimensionError("pacman sector is two-dimensional")
        if not self.radius > 0:
            raise ValueError("pacman radius must be positive")
        if not 0 <= self.removed_angle < 2 * math.pi:
            raise ValueError("removed angle must lie in [0, 2 pi)")

    dim = 2

    def bbox(self):
        c = np.array(self.center)
        return c - self.radius, c + self.radius

    def _contains(self, X):
        d = X - np.array(self.center)
        r = np.hypot(d[:, 0], d[:, 1])
        ang = np.abs(np.arctan2(d[:, 1], d[:, 0]))
        in_disk = r <= self.radius * (1 + MEMBERSHIP_TOL)
        outside_mouth = ang >= self.removed_angle / 2 - 1e-12
        at_center = r <= MEMBERSHIP_TOL * self.radius
        return in_disk & (outside_mouth | at_center)

    def diameter(self) -> float:
        kept = 2 * math.pi - self.removed_angle
        if kept >= math.pi:
            return 2.0 * self.radius
        return max(2.0 * self.radius * math.sin(kept / 2), self.radius)

    def volume(self) -> float:
        return 0.5 * self.radius ** 2 * (2 * math.pi - self.removed_angle)

    def centroid(self) -> np.ndarray:
        kept = 2 * math.pi - self.removed_angle
        half = kept / 2
        # centroid of a circular sector, pointing away from the mouth
        dist = 2 * self.radius * math.sin(half) / (3 * half)
        return np.array(self.center) + np.array([-dist, 0.0])

    def _edge_dirs(self):
        h = self.removed_angle / 2
        return np.array([[math.cos(h), math.sin(h)], [math.cos(h), -math.sin(h)]])

    def boundary_samples(self, count: int, rng) -> np.ndarray:
        R, h = self.radius, self.removed_angle / 2
        arc = R * (2 * math.pi - self.removed_angle)
        probs = np.array([arc, R, R]) / (arc + 2 * R)
        part = rng.choice(3, size=count, p=probs)
        u = rng.random(count)
        theta = h + u * (2 * math.pi - 2 * h)
        on_arc = R * np.column_stack([np.cos(theta), np.sin(theta)])
        dirs = self._edge_dirs()
        on_edge = (R * u)[:, None] * dirs[np.clip(part - 1, 0, 1)]
        pts = np.where((part == 0)[:, None], on_arc, on_edge)
        return np.array(self.center) + pts

    def corner_points(self) -> np.ndarray:
        c = np.array(self.center)
        return np.vstack([c, c + self.radius * self._edge_dirs()])

    def scaled(self, lam: float) -> "PacmanSector":
        return PacmanSector(tuple(np.array(self.center) * lam), self.radius * lam, self.removed_angle)

    def shifted(self, t) -> "PacmanSector":
        return PacmanSector(tuple(np.array(self.center) + np.ravel(t)), self.radius, self.removed_angle)

    def tag(self) -> str:
        return (f"pacman:{_t(self.radius)},{_angle_tag(self.removed_angle)}"
                + ("" if self.center == (0.0, 0.0) else "@" + ",".join(_t(v) for v in self.center)))


# -------------------------------------------------------------------------
# similarity transforms


def dilate(domain, lam: float):
    """Scale every shape parameter by `lam` about the origin."""
    if not lam > 0:
        raise InvalidScaleError(f"dilation factor must be positive, got {lam}")
    return domain.scaled(float(lam))


def translate(domain, shift):
    shift = np.ravel(np.asarray(shift, dtype=float))
    if shift.shape != (domain.dim,):
        raise DimensionMismatchError("translation vector has the wrong length")
    return domain.shifted(shift)


# -------------------------------------------------------------------------
# quadrature


@dataclass(frozen=True)
class QuadSpec:
    """How to build a quadrature rule.

    ``scheme`` is ``"auto"`` (tensor Gauss on intervals and boxes,
    Monte-Carlo elsewhere), ``"gauss"`` or ``"mc"``.  ``order`` is the number
    of Gauss points per axis; ``mc_samples`` the number of accepted points.
    """

    scheme: str = "auto"
    order: int = 8
    mc_samples: int = 20000
    seed: Optional[int] = None

    def refined(self, factor: int = 2) -> "QuadSpec":
        return QuadSpec(self.scheme, self.order * factor, self.mc_samples * factor, self.seed)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    scheme: str
    seed: Optional[int] = None

    def __len__(self):
        return len(self.weights)

    def integrate(self, values) -> float:
        values = np.broadcast_to(np.asarray(values, dtype=float), self.weights.shape)
        return float(np.sum(self.weights * values))

    def total_weight(self) -> float:
        return float(np.sum(self.weights))


def _gauss_1d(a: float, b: float, order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


def _tensor_gauss(lo, hi, order: int):
    rules = [_gauss_1d(l, h, order) for l, h in zip(lo, hi)]
    nodes = np.stack(np.meshgrid(*[r[0] for r in rules], indexing="ij"), axis=-1)
    weights = np.ones([order] * len(rules))
    for i, (_, w) in enumerate(rules):
        shape = [1] * len(rules)
        shape[i] = order
        weights = weights * w.reshape(shape)
    return nodes.reshape(-1, len(rules)), weights.ravel()


def _polar_rule(center, radius: float, order: int, theta0: float, theta1: float,
                periodic: bool):
    r, wr = _gauss_1d(0.0, radius, order)
    if periodic:
        nth = 2 * order
        th = theta0 + (theta1 - theta0) * np.arange(nth) / nth
        wth = np.full(nth, (theta1 - theta0) / nth)
    else:
        th, wth = _gauss_1d(theta0, theta1, 2 * order)
    R, TH = np.meshgrid(r, th, indexing="ij")
    W = (wr * r)[:, None] * wth[None, :]
    nodes = np.column_stack([(R * np.cos(TH)).ravel(), (R * np.sin(TH)).ravel()])
    return nodes + np.asarray(center), W.ravel()


def ball_quadrature(center, radius: float, order: int, seed: Optional[int] = None):
    """Product rule on a ball: Gauss in radius, polar/spherical in angle.

    One dimension uses Gauss-Legendre on the segment; two uses Gauss radial
    times trapezoid angular; three adds Gauss in the polar cosine.  Higher
    dimensions fall back to seeded Monte-Carlo with ``64 * order**2`` points.
    Returns ``(nodes, weights)``.
    """
    center = np.ravel(np.asarray(center, dtype=float))
    n = center.size
    if n == 1:
        x, w = _gauss_1d(center[0] - radius, center[0] + radius, order)
        return x[:, None], w
    if n == 2:
        return _polar_rule(center, radius, order, 0.0, 2 * math.pi, periodic=True)
    if n == 3:
        r, wr = _gauss_1d(0.0, radius, order)
        z, wz = np.polynomial.legendre.leggauss(order)
        nphi = 2 * order
        phi = 2 * math.pi * np.arange(nphi) / nphi
        wphi = np.full(nphi, 2 * math.pi / nphi)
        Rg, Zg, Pg = np.meshgrid(r, z, phi, indexing="ij")
        S = np.sqrt(1 - Zg ** 2)
        nodes = np.stack([Rg * S * np.cos(Pg), Rg * S * np.sin(Pg), Rg * Zg], axis=-1).reshape(-1, 3)
        W = (wr * r * r)[:, None, None] * wz[None, :, None] * wphi[None, None, :]
        return nodes + center, W.ravel()
    if seed is None:
        raise ValueError("Monte-Carlo ball quadrature in dimension > 3 needs a seed")
    ball = Ball(tuple(center), radius)
    rule = _monte_carlo(ball, 64 * order * order, seed)
    return rule.nodes, rule.weights


def _monte_carlo(domain, count: int, seed: Optional[int]) -> QuadratureRule:
    if seed is None:
        raise ValueError(f"Monte-Carlo quadrature on {domain.tag()} requires a seed")
    if count < 1:
        raise ValueError("mc_samples must be >= 1")
    lo, hi = domain.bbox()
    rng = np.random.default_rng(seed)
    accepted: list[np.ndarray] = []
    n_acc, drawn = 0, 0
    while n_acc < count:
        batch = lo + (hi - lo) * rng.random((MC_BATCH, domain.dim))
        mask = domain._contains(batch)
        hits = np.flatnonzero(mask)
        need = count - n_acc
        if len(hits) >= need:
            # stop counting draws at the point that completes the sample
            drawn += int(hits[need - 1]) + 1
            accepted.append(batch[hits[:need]])
            n_acc = count
        else:
            drawn += MC_BATCH
            accepted.append(batch[hits])
            n_acc += len(hits)
        if n_acc == 0 and drawn >= 200 * MC_BATCH:
            raise DegenerateDomainError(f"rejection sampling accepted no points in {domain.tag()}")
    nodes = np.vstack(accepted)
    vol = float(np.prod(hi - lo)) * count / drawn
    return QuadratureRule(nodes, np.full(count, vol / count), "monte-carlo", seed)


def quadrature(domain, spec: QuadSpec = QuadSpec()) -> QuadratureRule:
    """Build the quadrature rule `spec` describes on `domain`."""
    if spec.order < 1:
        raise ValueError("quadrature order must be >= 1")
    tensorable = isinstance(domain, (Interval, Box))
    scheme = spec.scheme
    if scheme == "auto":
        scheme = "gauss" if tensorable else "mc"
    if scheme == "mc":
        return _monte_carlo(domain, spec.mc_samples, spec.seed)
    if scheme != "gauss":
        raise ValueError(f"unknown quadrature scheme {spec.scheme!r}")
    if tensorable:
        lo, hi = domain.bbox()
        nodes, weights = _tensor_gauss(lo, hi, spec.order)
    elif isinstance(domain, Ball) and domain.dim <= 3:
        nodes, weights = ball_quadrature(domain.center, domain.radius, spec.order)
    elif isinstance(domain, PacmanSector):
        h = domain.removed_angle / 2
        nodes, weights = _polar_rule(domain.center, domain.radius, spec.order,
                                     h, 2 * math.pi - h, periodic=domain.removed_angle == 0)
    else:
        raise ValueError(f"no Gauss-type rule for {type(domain).__name__}; use scheme 'mc'")
    return QuadratureRule(nodes, weights, "tensor-gauss", None)


# -------------------------------------------------------------------------
# chunkiness


@dataclass(frozen=True)
class ChunkinessReport:
    rho_max: float
    center: tuple
    gamma: float
    certified: bool
    diameter: float = field(default=float("nan"))

    @property
    def radius(self) -> float:
        return 0.5 * self.rho_max


class _StarTester:
    """Sampled test of the star condition for one domain."""

    def __init__(self, domain, n_boundary: int = 240, n_dirs: int = 32, n_t: int = 16):
        rng = np.random.default_rng(20240917)
        self.domain = domain
        self.X = np.vstack([domain.boundary_samples(n_boundary, rng), domain.corner_points()])
        dirs = _sphere_directions(domain.dim, n_dirs)
        self.dirs = np.vstack([np.zeros((1, domain.dim)), dirs])
        self.t = np.linspace(0.0, 1.0, n_t + 1)[1:]

    def ok(self, center: np.ndarray, radius: float) -> bool:
        B = center + radius * self.dirs
        if not self.domain._contains(B).all():
            return False
        # (1 - t) x + t b over all x, b, t
        seg = (self.X[:, None, None, :] * (1 - self.t)[None, None, :, None]
               + B[None, :, None, :] * self.t[None, None, :, None])
        return bool(self.domain._contains(seg.reshape(-1, self.domain.dim)).all())


def search_star_ball(domain, grid: int = 16, refine: int = 5, bisect: int = 24,
                     safety: float = 0.995):
    """Largest ball found by grid search over centers and bisection on radius.

    Candidate centers form a ``grid**n`` lattice over the bounding box; the
    best one is then refined on ``5**n`` local lattices of halving spacing.
    Ties keep the first center found, so the result is deterministic.
    Returns ``(center, radius)``; radius 0 means no valid ball was found.
    """
    tester = _StarTester(domain)
    lo, hi = domain.bbox()
    r_hi = 0.5 * domain.diameter()
    best_c, best_r = None, 0.0

    def try_center(c):
        nonlocal best_c, best_r
        if not domain._contains(c[None, :])[0]:
            return
        if best_c is None:
            if not tester.ok(c, 0.0):
                return
            best_c = c
        elif not tester.ok(c, best_r):
            return
        a, b = best_r, r_hi
        if tester.ok(c, b):
            a = b
        else:
            for _ in range(bisect):
                mid = 0.5 * (a + b)
                if tester.ok(c, mid):
                    a = mid
                else:
                    b = mid
        if a > best_r or best_c is None:
            best_c, best_r = c, a

    step = (hi - lo) / grid
    axes = [l + (np.arange(grid) + 0.5) * s for l, s in zip(lo, step)]
    for c in np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, domain.dim):
        try_center(c)
    if best_c is None:
        return None, 0.0
    offsets = np.stack(np.meshgrid(*[np.arange(-2, 3)] * domain.dim, indexing="ij"),
                       axis=-1).reshape(-1, domain.dim)
    for _ in range(refine):
        step = step / 2
        anchor = best_c
        for off in offsets:
            if off.any():
                try_center(anchor + off * step)
    return best_c, best_r * safety


@lru_cache(maxsize=128)
def chunkiness(domain, grid: int = 16, refine: int = 5) -> ChunkinessReport:
    """Star-ball diameter ``rho_max`` and ``gamma = d / rho_max``.

    Exact for intervals, boxes, balls and convex polytopes (inscribed ball);
    search based (``certified=False``) for the pacman sector.
    """
    d = domain.diameter()
    if isinstance(domain, Interval):
        return ChunkinessReport(d, tuple(float(v) for v in domain.centroid()), 1.0, True, d)
    if isinstance(domain, Ball):
        return ChunkinessReport(d, domain.center, 1.0, True, d)
    if isinstance(domain, Box):
        lo, hi = domain.bbox()
        rho = float(np.min(hi - lo))
        return ChunkinessReport(rho, tuple(float(v) for v in domain.centroid()), d / rho, True, d)
    if isinstance(domain, ConvexPolytope):
        eq = domain._hull.equations
        A, b = eq[:, :-1], -eq[:, -1]
        norms = np.linalg.norm(A, axis=1)
        c = np.zeros(domain.dim + 1)
        c[-1] = -1.0
        res = linprog(c, A_ub=np.column_stack([A, norms]), b_ub=b,
                      bounds=[(None, None)] * domain.dim + [(0, None)], method="highs")
        if not res.success or res.x[-1] <= 0:
            raise NotStarShapedError(f"no inscribed ball in {domain.tag()}")
        rho = 2.0 * float(res.x[-1])
        return ChunkinessReport(rho, tuple(float(v) for v in res.x[:-1]), d / rho, True, d)
    center, radius = search_star_ball(domain, grid=grid, refine=refine)
    if center is None or radius <= 0:
        raise NotStarShapedError(f"no star ball found for {domain.tag()} at grid {grid}")
    rho = 2.0 * radius
    return ChunkinessReport(rho, tuple(float(v) for v in center), d / rho, False, d)


def validate_star_ball(domain, center, radius: float, n_points: int = 200, n_ball: int = 50,
                       seed: int = 0) -> float:
    """Fraction of sampled hull points ``(1 - t) x + t b`` lying in the domain.

    `x` runs over random boundary points, `b` over random points of the ball
    and ``t`` over ``0.1, ..., 0.9``.
    """
    rng = np.random.default_rng(seed)
    X = domain.boundary_samples(n_points, rng)
    g = rng.standard_normal((n_ball, domain.dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    rad = radius * rng.random(n_ball) ** (1.0 / domain.dim)
    B = np.asarray(center) + rad[:, None] * g
    t = np.arange(1, 10) / 10
    seg = X[:, None, None, :] * (1 - t)[None, None, :, None] + B[None, :, None, :] * t[None, None, :, None]
    return float(domain._contains(seg.reshape(-1, domain.dim)).mean())


# -------------------------------------------------------------------------
# textual specifications

_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_PI = re.compile(rf"^(?:({_NUM})\*?)?pi(?:/({_NUM}))?$")


def _number(text: str) -> float:
    text = text.strip()
    m = _PI.match(text)
    if m:
        return float(m.group(1) or 1.0) * math.pi / float(m.group(2) or 1.0)
    return float(text)


def parse_domain(text: str):
    """Parse a compact domain tag.

    ``interval:a,b``, ``square:s``, ``box:lo1,..,lon,hi1,..,hin``,
    ``disk:r``, ``ball:c1,..,cn,r``, ``pacman:R,angle`` (angle may be
    written ``pi/2``) and ``polytope:x1,y1;x2,y2;...``.
    """
    shape, _, rest = text.partition(":")
    shape = shape.strip().lower()
    try:
        if shape == "polytope":
            verts = [[_number(v) for v in row.split(",")] for row in rest.split(";") if row.strip()]
            return ConvexPolytope(tuple(tuple(v) for v in verts))
        center = None
        if "@" in rest:
            rest, _, where = rest.partition("@")
            center = tuple(_number(v) for v in where.split(","))
        vals = [_number(v) for v in rest.split(",")] if rest.strip() else []
        if shape == "interval" and len(vals) == 2:
            return Interval(*vals)
        if shape == "square" and len(vals) == 1:
            return Box((0.0, 0.0), (vals[0], vals[0]))
        if shape == "cube" and len(vals) == 1:
            return Box((0.0,) * 3, (vals[0],) * 3)
        if shape == "box" and vals and len(vals) % 2 == 0:
            n = len(vals) // 2
            return Box(tuple(vals[:n]), tuple(vals[n:]))
        if shape == "disk" and len(vals) == 1:
            return Ball(center or (0.0, 0.0), vals[0])
        if shape == "ball" and len(vals) >= 2:
            return Ball(tuple(vals[:-1]), vals[-1])
        if shape == "pacman" and len(vals) == 2:
            return PacmanSector(center or (0.0, 0.0), vals[0], vals[1])
    except (ValueError, TypeError) as exc:
        raise ValueError(f"bad domain spec {text!r}: {exc}") from exc
    raise ValueError(f"bad domain spec {text!r}")


def domain_from_mapping(cfg: Mapping):
    """Domain from a config mapping with a ``shape`` key."""
    shape = str(cfg["shape"]).lower()
    num = lambda v: _number(str(v))  # noqa: E731
    if shape == "interval":
        return Interval(num(cfg["a"]), num(cfg["b"]))
    if shape == "box":
        return Box(tuple(map(num, cfg["lo"])), tuple(map(num, cfg["hi"])))
    if shape in ("ball", "disk"):
        return Ball(tuple(map(num, cfg.get("center", (0.0, 0.0)))), num(cfg["radius"]))
    if shape == "polytope":
        return ConvexPolytope(tuple(tuple(map(num, v)) for v in cfg["vertices"]))
    if shape == "pacman":
        return PacmanSector(tuple(map(num, cfg.get("center", (0.0, 0.0)))),
                            num(cfg["radius"]), num(cfg["removed_angle"]))
    if shape == "square":
        s = num(cfg["side"])
        return Box((0.0, 0.0), (s, s))
    raise ValueError(f"unknown shape {shape!r}")
