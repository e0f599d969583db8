"""Taylor polynomials, the bump mollifier and averaged Taylor polynomials."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .domain import ball_quadrature
from .errors import OutOfDomainError
from .field import DifferentiableField, deriv
from .multiindex import indices_upto
from .polyspace import Polynomial

__all__ = ["MollifierBall", "mollifier", "taylor_poly", "averaged_taylor", "bump_profile"]

BALL_ORDER = 64
BALL_ORDER_3D = 24


def bump_profile(s: np.ndarray) -> np.ndarray:
    """``exp(-1 / (1 - s^2))`` for ``|s| < 1``, zero elsewhere (unnormalized)."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return out


@dataclass(frozen=True, eq=False)
class MollifierBall:
    """Normalized smooth bump supported on a ball, with its quadrature.

    ``density`` holds ``weights * psi(nodes)``, so integrating ``f`` against
    ``psi`` is ``density @ f(nodes)``.
    """

    center: np.ndarray
    radius: float
    scale: float
    nodes: np.ndarray
    weights: np.ndarray
    profile: str = "bump"

    @property
    def dim(self) -> int:
        return self.center.size

    def __call__(self, y) -> np.ndarray | float:
        y = np.asarray(y, dtype=float)
        s = np.linalg.norm(y.reshape(-1, self.dim) - self.center, axis=1) / self.radius
        out = self.scale * bump_profile(s)
        return float(out[0]) if y.ndim == 1 else out

    @property
    def density(self) -> np.ndarray:
        return self.weights * self(self.nodes)

    def integral(self) -> float:
        return float(np.sum(self.density))


def mollifier(center, radius: float, order: Optional[int] = None,
              seed: Optional[int] = None) -> MollifierBall:
    """Bump ``c exp(-1/(1 - |y - center|^2 / radius^2))`` normalized on its own rule.

    `order` is the radial Gauss order of the ball quadrature; the default is
    64 in one and two dimensions and 24 in three.
    """
    if not radius > 0:
        raise ValueError(f"mollifier radius must be positive, got {radius}")
    center = np.ravel(np.asarray(center, dtype=float))
    if order is None:
        order = BALL_ORDER if center.size <= 2 else BALL_ORDER_3D
    nodes, weights = ball_quadrature(center, radius, order, seed=seed)
    s = np.linalg.norm(nodes - center, axis=1) / radius
    scale = 1.0 / float(np.sum(weights * bump_profile(s)))
    return MollifierBall(center, float(radius), scale, nodes, weights)


def _local_coefficients(u: DifferentiableField, Y: np.ndarray, m: int, center: np.ndarray,
                        density: np.ndarray) -> dict:
    """``sum_i density_i * T_{y_i}`` as coefficients of ``(x - center)^beta``.

    With ``z = center - y``, the monomial ``(x - y)^alpha`` equals
    ``sum_{beta <= alpha} C(alpha, beta) (x - center)^beta z^(alpha - beta)``
    and ``C(alpha, beta) / alpha! = 1 / (beta! (alpha - beta)!)``.
    """
    Z = center - Y
    basis = indices_upto(u.dim, m - 1)
    weighted = {a: density * np.broadcast_to(np.asarray(deriv(u, a)(Y), dtype=float), density.shape)
                for a in basis}
    out = {}
    for beta in basis:
        total = 0.0
        for alpha in basis:
            if not beta.dominated_by(alpha):
                continue
            gap = alpha - beta
            zpow = np.ones(len(Y))
            for i, g in enumerate(gap):
                if g:
                    zpow = zpow * Z[:, i] ** g
            total += float(np.sum(weighted[alpha] * zpow)) / (beta.factorial() * gap.factorial())
        out[beta] = total
    return out


def taylor_poly(u: DifferentiableField, y, m: int) -> Polynomial:
    """Taylor polynomial of `u` at `y` of degree at most ``m - 1``, about the origin."""
    if m < 1:
        raise ValueError("Taylor order m must be >= 1")
    y = np.ravel(np.asarray(y, dtype=float))
    local = _local_coefficients(u, y[None, :], m, y, np.ones(1))
    return Polynomial.from_local(u.dim, m - 1, local, y)


def _check_inside(u: DifferentiableField, B: MollifierBall):
    if u.region is None:
        return
    ok = u.region.contains(B.nodes)
    rim = B.center + B.radius * np.vstack([np.eye(B.dim), -np.eye(B.dim)])
    if not (np.all(ok) and np.all(u.region.contains(rim))):
        raise OutOfDomainError(
            f"mollifier ball (center {B.center}, radius {B.radius:g}) leaves the region of {u.label}")


def averaged_taylor(u: DifferentiableField, B: MollifierBall, m: int) -> Polynomial:
    """Average of ``T_y^m u`` over ``y`` in `B`, weighted by the mollifier.

    Each coefficient is integrated with the ball quadrature after expanding
    about the ball center; the result is then re-expanded about the origin.
    """
    if m < 1:
        raise ValueError("Taylor order m must be >= 1")
    _check_inside(u, B)
    local = _local_coefficients(u, B.nodes, m, B.center, B.density)
    return Polynomial.from_local(u.dim, m - 1, local, B.center)
