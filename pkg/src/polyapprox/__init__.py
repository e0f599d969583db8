"""Polynomial approximation in Sobolev seminorms on star-shaped domains.

Averaged Taylor polynomials, discrete L2 projections, chunkiness of
domains, and an engine that measures how the approximation error compares
with ``d^(m-k) |u|_{m,p}``.
"""

from .domain import (
    Ball,
    Box,
    ConvexPolytope,
    Interval,
    PacmanSector,
    QuadSpec,
    QuadratureRule,
    chunkiness,
    parse_domain,
    quadrature,
)
from .field import DifferentiableField, corpus_field, deriv, parse_field, sobolev_seminorm
from .multiindex import MultiIndex, enumerate_indices, factorial, power
from .polyspace import Polynomial, l2_project, seminorm_project
from .taylor import averaged_taylor, mollifier, taylor_poly
from .verify import (
    BoundQuery,
    bound_check,
    constant_sweep,
    dilation_sweep,
    functional_check,
    interp1d_check,
)

__version__ = "0.1.0"
