"""Reproducing kernels with product weights.

Three spaces are covered: the Korobov space of smoothness alpha = 1, the
finite dimensional space of multilinear functions and the unanchored Sobolev
space of smoothness one. Every kernel has the product form
prod_j (1 + t_j(x, y)); the per-dimension terms t_j are what the vectorised
Gram builders below return.
"""

from __future__ import annotations

import math
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from .errors import DimensionError
from .special import bernoulli1, bernoulli2

Coordinate = Union[float, int, Fraction]
Point = Sequence[Coordinate]

TWO_PI_SQUARED = 2.0 * math.pi**2


class ProductWeights(BaseModel):
    """Per-dimension weights gamma_j; a subset u carries gamma_u = prod gamma_j."""

    model_config = ConfigDict(frozen=True)

    gamma: tuple[float, ...]

    @field_validator("gamma")
    @classmethod
    def _positive(cls, gamma: tuple[float, ...]) -> tuple[float, ...]:
        if not gamma:
            raise ValueError("product weights need at least one dimension")
        for j, g in enumerate(gamma, start=1):
            if not (g > 0 and math.isfinite(g)):
                raise ValueError(f"gamma_{j} = {g} must be positive and finite")
        return gamma

    @classmethod
    def ones(cls, s: int) -> "ProductWeights":
        return cls(gamma=(1.0,) * s)

    @classmethod
    def broadcast(cls, gamma: Union[float, Sequence[float]], s: int) -> "ProductWeights":
        """Weights for s dimensions from a scalar or from exactly s values."""
        if isinstance(gamma, (int, float)):
            return cls(gamma=(float(gamma),) * s)
        values = tuple(float(g) for g in gamma)
        if len(values) == 1:
            values = values * s
        if len(values) != s:
            raise DimensionError(f"got {len(values)} weights for s = {s}")
        return cls(gamma=values)

    @property
    def s(self) -> int:
        return len(self.gamma)

    def __getitem__(self, j: int) -> float:
        return self.gamma[j]

    def subset(self, u: Iterable[int]) -> float:
        """gamma_u for a subset u of 0-based dimension indices."""
        return math.prod(self.gamma[j] for j in u)

    def scaled(self, factor: float) -> "ProductWeights":
        return ProductWeights(gamma=tuple(g * factor for g in self.gamma))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.gamma, dtype=float)

    def check_dimension(self, s: int) -> None:
        if self.s != s:
            raise DimensionError(f"weights have s = {self.s}, points have s = {s}")


class Kernel(str, Enum):
    korobov1 = "korobov1"
    multilinear = "multilinear"
    usobolev1 = "usobolev1"


def _fractional_difference(x: Coordinate, y: Coordinate) -> Union[float, Fraction]:
    # {x - y}; exact when both are rationals.
    if isinstance(x, (int, Fraction)) and isinstance(y, (int, Fraction)):
        return (Fraction(x) - Fraction(y)) % 1
    return (float(x) - float(y)) % 1.0


def _wrapped_b2(x: Coordinate, y: Coordinate) -> float:
    # fold {x - y} onto [0, 1/2]; B_2(t) = B_2(1 - t)
    d = _fractional_difference(x, y)
    return bernoulli2(min(d, 1 - d))


def _checked(x: Point, y: Point, gamma: ProductWeights) -> None:
    if len(x) != len(y):
        raise DimensionError(f"points have dimensions {len(x)} and {len(y)}")
    gamma.check_dimension(len(x))


def korobov1_kernel(x: Point, y: Point, gamma: ProductWeights) -> float:
    """prod_j (1 + 2 pi^2 gamma_j B_2({x_j - y_j}))."""
    _checked(x, y, gamma)
    return math.prod(
        1.0 + TWO_PI_SQUARED * g * _wrapped_b2(xj, yj)
        for xj, yj, g in zip(x, y, gamma.gamma)
    )


def multilinear_kernel(x: Point, y: Point, gamma: ProductWeights) -> float:
    """prod_j (1 + 12 gamma_j B_1(x_j) B_1(y_j))."""
    _checked(x, y, gamma)
    return math.prod(
        1.0 + 12.0 * g * (bernoulli1(xj) * bernoulli1(yj))
        for xj, yj, g in zip(x, y, gamma.gamma)
    )


def usobolev1_kernel(x: Point, y: Point, gamma: ProductWeights) -> float:
    """prod_j (1 + gamma_j B_1(x_j) B_1(y_j) + gamma_j B_2({x_j - y_j}) / 2)."""
    _checked(x, y, gamma)
    return math.prod(
        1.0
        + g * (bernoulli1(xj) * bernoulli1(yj))
        + g * _wrapped_b2(xj, yj) / 2.0
        for xj, yj, g in zip(x, y, gamma.gamma)
    )


KERNEL_FUNCTIONS = {
    Kernel.korobov1: korobov1_kernel,
    Kernel.multilinear: multilinear_kernel,
    Kernel.usobolev1: usobolev1_kernel,
}


def prod_minus_one(terms: np.ndarray) -> np.ndarray:
    """prod_j (1 + t_j) - 1 over the last axis, without forming the product first."""
    result = np.zeros(terms.shape[:-1], dtype=float)
    for j in range(terms.shape[-1]):
        t = terms[..., j]
        result = result * (1.0 + t) + t
    return result


def pairwise_b1(x: np.ndarray, y: np.ndarray, denominator: int) -> np.ndarray:
    """Array [k, l, j] = B_1(x_kj) B_1(y_lj) for integer numerators x, y over ``denominator``."""
    bx = x / denominator - 0.5
    by = y / denominator - 0.5
    return bx[:, None, :] * by[None, :, :]


def pairwise_b2(x: np.ndarray, y: np.ndarray, denominator: int) -> np.ndarray:
    """Array [k, l, j] = B_2({x_kj - y_lj}), the wrap taken on the integer numerators."""
    diff = np.mod(x[:, None, :] - y[None, :, :], denominator) / denominator
    return diff * diff - diff + 1.0 / 6.0


def kernel_terms(
    kernel: Kernel,
    x: np.ndarray,
    denominator: int,
    gamma: ProductWeights,
    y: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Per-dimension terms t_j of K(x_k, y_l) = prod_j (1 + t_j) for all node pairs.

    Args:
        kernel: which reproducing kernel.
        x: integer numerators of the row nodes, shape (M_x, s).
        denominator: common denominator of all numerators.
        gamma: product weights, one per dimension.
        y: numerators of the column nodes; defaults to ``x``.

    Returns:
        Array of shape (M_x, M_y, s).
    """
    kernel = Kernel(kernel)
    y = x if y is None else y
    gamma.check_dimension(x.shape[1])
    g = gamma.as_array()
    if kernel is Kernel.korobov1:
        return TWO_PI_SQUARED * g * pairwise_b2(x, y, denominator)
    if kernel is Kernel.multilinear:
        return 12.0 * g * pairwise_b1(x, y, denominator)
    return g * pairwise_b1(x, y, denominator) + g * pairwise_b2(x, y, denominator) / 2.0


def gram_minus_one(
    kernel: Kernel,
    x: np.ndarray,
    denominator: int,
    gamma: ProductWeights,
    y: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Matrix K(x_k, y_l) - 1 over all node pairs of a rational point set."""
    return prod_minus_one(kernel_terms(kernel, x, denominator, gamma, y))
