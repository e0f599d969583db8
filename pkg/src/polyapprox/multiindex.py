"""Multi-indices: exponent vectors for mixed partial derivatives and monomials."""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatchError, InvalidDimensionError

__all__ = ["MultiIndex", "enumerate_indices", "indices_upto", "factorial", "power"]


class MultiIndex(tuple):
    """Immutable tuple of non-negative integers.

    >>> a = MultiIndex((2, 1, 0))
    >>> a.order(), a.factorial()
    (3, 2)
    """

    def __new__(cls, exponents: Iterable[int]):
        values = tuple(int(e) for e in exponents)
        if any(e < 0 for e in values):
            raise ValueError(f"negative exponent in multi-index {values}")
        return super().__new__(cls, values)

    @classmethod
    def zero(cls, n: int) -> "MultiIndex":
        return cls((0,) * n)

    @classmethod
    def unit(cls, n: int, i: int) -> "MultiIndex":
        e = [0] * n
        e[i] = 1
        return cls(e)

    @property
    def dim(self) -> int:
        return len(self)

    def order(self) -> int:
        return sum(self)

    def factorial(self) -> int:
        return factorial(self)

    def power(self, z) -> float:
        return power(self, z)

    def __add__(self, other):  # componentwise, not concatenation
        if len(other) != len(self):
            raise DimensionMismatchError(f"{self} + {other}")
        return MultiIndex(a + b for a, b in zip(self, other))

    def __sub__(self, other):
        if len(other) != len(self):
            raise DimensionMismatchError(f"{self} - {other}")
        return MultiIndex(a - b for a, b in zip(self, other))

    def dominated_by(self, other) -> bool:
        """Componentwise ``self <= other``."""
        return all(a <= b for a, b in zip(self, other))

    def __repr__(self):
        return f"MultiIndex({tuple(self)})"


@lru_cache(maxsize=None)
def _compositions(n: int, k: int) -> tuple:
    if n == 1:
        return ((k,),)
    out = []
    for first in range(k, -1, -1):
        for rest in _compositions(n - 1, k - first):
            out.append((first,) + rest)
    return tuple(out)


def enumerate_indices(n: int, k: int) -> list[MultiIndex]:
    """All multi-indices of length `n` and order exactly `k`.

    Graded lexicographic order, largest first exponent first:
    ``enumerate_indices(2, 2) == [(2, 0), (1, 1), (0, 2)]``.
    """
    if n < 1:
        raise InvalidDimensionError(f"dimension must be >= 1, got {n}")
    if k < 0:
        raise ValueError(f"order must be >= 0, got {k}")
    return [MultiIndex(a) for a in _compositions(n, k)]


def indices_upto(n: int, degree: int) -> list[MultiIndex]:
    """All multi-indices with order 0, 1, ..., `degree`, graded."""
    out: list[MultiIndex] = []
    for k in range(degree + 1):
        out.extend(enumerate_indices(n, k))
    return out


def factorial(alpha: Sequence[int]) -> int:
    return math.prod(math.factorial(a) for a in alpha)


def power(alpha: Sequence[int], z) -> float | np.ndarray:
    """``z ** alpha`` with ``0 ** 0 == 1``.

    `z` may be a single point of shape ``(n,)`` or a batch ``(N, n)``;
    the batch form returns an array of shape ``(N,)``.
    """
    z = np.asarray(z, dtype=float)
    if z.shape[-1] != len(alpha):
        raise DimensionMismatchError(
            f"multi-index of length {len(alpha)} applied to point of length {z.shape[-1]}")
    out = np.ones(z.shape[:-1])
    for i, a in enumerate(alpha):
        if a:
            out = out * z[..., i] ** a
    return float(out) if out.ndim == 0 else out
