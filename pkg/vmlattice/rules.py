"""Rank-1 lattice rules and their vertex modified variants.

A vertex modified rule keeps the N - 1 interior lattice nodes with weight
1/N and spreads the weight of the origin over the 2^s corners of the unit
cube. Two weightings are provided: the trapezoidal one (equal corner weights)
and the optimal one, which integrates every multilinear polynomial exactly.

All nodes are kept as exact rationals (integer numerators over a common
denominator); floating point only enters when weights or integrands are
evaluated.
"""

from __future__ import annotations

import json
import logging
import math
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from .config import Scheme
from .errors import DimensionError, InvalidRule
from .numtheory import gcd

logger = logging.getLogger(__name__)

Corner = tuple[int, ...]


def corner(code: int, s: int) -> Corner:
    """Corner a in {0,1}^s with a_1 the least significant bit of ``code``."""
    return tuple((code >> j) & 1 for j in range(s))


class LatticeRule(BaseModel):
    """Rank-1 lattice rule with generating vector z and N points."""

    model_config = ConfigDict(frozen=True)

    z: tuple[int, ...]
    N: int

    @model_validator(mode="before")
    @classmethod
    def _reduce_generator(cls, data):
        if not isinstance(data, dict) or "z" not in data or "N" not in data:
            return data
        N = int(data["N"])
        if N < 1:
            raise InvalidRule(f"N = {N} must be positive")
        z = tuple(int(zj) for zj in data["z"])
        if not z:
            raise InvalidRule("the generating vector needs at least one component")
        for j, zj in enumerate(z, start=1):
            if gcd(zj % N, N) != 1:
                raise InvalidRule(f"z_{j} = {zj} is not coprime to N = {N}")
        return {**data, "N": N, "z": tuple(zj % N for zj in z)}

    @property
    def s(self) -> int:
        return len(self.z)

    def numerators(self) -> np.ndarray:
        """Integer array [k, j] = k z_j mod N for k = 0..N-1."""
        k = np.arange(self.N, dtype=np.int64)[:, None]
        return (k * np.asarray(self.z, dtype=np.int64)[None, :]) % self.N


def lattice_points(rule: LatticeRule) -> list[tuple[Fraction, ...]]:
    """The N nodes {k z / N}, k = 0..N-1, as exact rationals."""
    return [tuple(Fraction(int(n), rule.N) for n in row) for row in rule.numerators()]


class VertexWeights(BaseModel):
    """Weights of the 2^s corners, indexed by corner code."""

    model_config = ConfigDict(frozen=True)

    s: int
    N: int
    weights: tuple[float, ...]

    @model_validator(mode="after")
    def _one_weight_per_corner(self) -> "VertexWeights":
        if len(self.weights) != 2**self.s:
            raise DimensionError(f"{len(self.weights)} vertex weights for s = {self.s}")
        return self

    def __getitem__(self, a: Corner) -> float:
        return self.weights[sum(bit << j for j, bit in enumerate(a))]

    def items(self) -> Iterator[tuple[Corner, float]]:
        for code, w in enumerate(self.weights):
            yield corner(code, self.s), w

    @property
    def total(self) -> float:
        return math.fsum(self.weights)

    def negative_corners(self) -> list[Corner]:
        return [a for a, w in self.items() if w < 0]


def trapezoidal_weights(s: int, N: int) -> VertexWeights:
    """Every corner gets 1 / (2^s N)."""
    if s < 1:
        raise DimensionError(f"dimension s = {s} must be at least 1")
    return VertexWeights(s=s, N=N, weights=(1.0 / (2**s * N),) * 2**s)


def optimal_vertex_weights(rule: LatticeRule) -> VertexWeights:
    """Corner weights that make the rule exact on all multilinear polynomials.

    w*(a) = 1/2^s - (1/N) sum_{k=1}^{N-1} l_u({k z / N}), with u the support
    of a and l_u(x) = prod_{j in u} x_j prod_{j not in u} (1 - x_j). The sum
    is accumulated in integers (every factor is a numerator over N).
    """
    s, N = rule.s, rule.N
    interior = rule.numerators()[1:].astype(object)
    weights = []
    for code in range(2**s):
        a = np.asarray(corner(code, s), dtype=bool)
        factors = np.where(a[None, :], interior, N - interior)
        total = int(factors.prod(axis=1).sum()) if len(factors) else 0
        exact = Fraction(1, 2**s) - Fraction(total, N ** (s + 1))
        weights.append(float(exact))
    result = VertexWeights(s=s, N=N, weights=tuple(weights))
    negative = result.negative_corners()
    if negative:
        logger.warning("optimal vertex weights for z=%s, N=%d are negative at %s", rule.z, N, negative)
    return result


class WeightedRule(BaseModel):
    """Cubature rule sum_k w_k f(x_k) with rational nodes numerators[k] / denominator."""

    model_config = ConfigDict(frozen=True)

    numerators: tuple[tuple[int, ...], ...]
    denominator: int
    weights: tuple[float, ...]
    scheme: Optional[Scheme] = None
    lattice: Optional[LatticeRule] = None
    vertex_weights: Optional[VertexWeights] = None

    @model_validator(mode="after")
    def _consistent(self) -> "WeightedRule":
        if not self.numerators:
            raise InvalidRule("a cubature rule needs at least one node")
        if len(self.numerators) != len(self.weights):
            raise InvalidRule(f"{len(self.numerators)} nodes but {len(self.weights)} weights")
        s = len(self.numerators[0])
        for row in self.numerators:
            if len(row) != s:
                raise DimensionError("nodes of mixed dimension")
            if any(not 0 <= n <= self.denominator for n in row):
                raise InvalidRule(f"node {row}/{self.denominator} lies outside [0, 1]^s")
        return self

    @classmethod
    def from_points(
        cls, points: Sequence[Sequence[Union[int, Fraction, float]]], weights: Sequence[float]
    ) -> "WeightedRule":
        """Rule from arbitrary rational nodes in [0, 1]^s."""
        exact = [[Fraction(x) for x in p] for p in points]
        denominator = math.lcm(*(x.denominator for p in exact for x in p))
        numerators = tuple(tuple(int(x * denominator) for x in p) for p in exact)
        return cls(numerators=numerators, denominator=denominator, weights=tuple(float(w) for w in weights))

    @property
    def M(self) -> int:
        return len(self.weights)

    @property
    def s(self) -> int:
        return len(self.numerators[0])

    @property
    def nodes(self) -> list[tuple[Fraction, ...]]:
        return [tuple(Fraction(n, self.denominator) for n in row) for row in self.numerators]

    def numerator_array(self) -> np.ndarray:
        return np.asarray(self.numerators, dtype=np.int64)

    def point_array(self) -> np.ndarray:
        return self.numerator_array() / self.denominator

    def weight_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    @property
    def weight_sum(self) -> float:
        return math.fsum(self.weights)

    def to_payload(self) -> dict:
        vertex = []
        if self.vertex_weights is not None:
            vertex = [{"corner": list(a), "w": w} for a, w in self.vertex_weights.items()]
        return {
            "N": self.lattice.N if self.lattice else self.denominator,
            "s": self.s,
            "z": list(self.lattice.z) if self.lattice else None,
            "scheme": self.scheme.value if self.scheme else None,
            "vertex_weights": vertex,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_payload())


def build_rule(rule: LatticeRule, scheme: Union[Scheme, str] = Scheme.plain) -> WeightedRule:
    """Plain lattice rule, or its trapezoidal / optimal vertex modification.

    Vertex modified rules list the 2^s corners first (binary order, a_1 least
    significant), then the interior nodes k = 1..N-1; M = 2^s + N - 1.
    """
    scheme = Scheme(scheme)
    s, N = rule.s, rule.N
    lattice = [tuple(int(n) for n in row) for row in rule.numerators()]
    if scheme is Scheme.plain:
        return WeightedRule(
            numerators=tuple(lattice), denominator=N, weights=(1.0 / N,) * N, scheme=scheme, lattice=rule
        )

    vertex = trapezoidal_weights(s, N) if scheme is Scheme.trapezoidal else optimal_vertex_weights(rule)
    corners = [tuple(bit * N for bit in a) for a, _ in vertex.items()]
    return WeightedRule(
        numerators=tuple(corners + lattice[1:]),
        denominator=N,
        weights=vertex.weights + (1.0 / N,) * (N - 1),
        scheme=scheme,
        lattice=rule,
        vertex_weights=vertex,
    )


def apply_rule(rule: WeightedRule, f: Callable[[np.ndarray], float]) -> float:
    """Q(f) = sum_k w_k f(x_k); ``f`` receives each node as a float vector."""
    points = rule.point_array()
    return math.fsum(w * float(f(x)) for w, x in zip(rule.weights, points))
