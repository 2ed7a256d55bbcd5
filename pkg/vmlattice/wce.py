"""Worst-case errors of cubature rules in the three reproducing kernel spaces.

The squared worst-case error of Q(f) = sum_k w_k f(x_k) in a space whose
kernel integrates to one is sum_{k,l} w_k w_l K(x_k, x_l) - 1. That quadratic
form is the oracle here; everything else (the O(N) Korobov lattice formula,
the split of the unanchored Sobolev error into multilinear, Korobov and
mixture parts, and the two-dimensional closed forms in cotangent sums) is
checked against it.
"""

from __future__ import annotations

import itertools
import logging
import math
from typing import Callable, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, model_validator

from .config import KorobovConvention, closed_form_max_N, negative_clamp_tolerance, weight_sum_tolerance
from .errors import DimensionError, DomainError, NotInvertible, NumericalConsistencyError, ProblemTooLarge, WeightSumError
from .kernels import (
    Kernel,
    KERNEL_FUNCTIONS,
    ProductWeights,
    TWO_PI_SQUARED,
    gram_minus_one,
    pairwise_b1,
    pairwise_b2,
    prod_minus_one,
)
from .numtheory import gcd, mod_inverse, require_prime
from .rules import LatticeRule, WeightedRule
from .special import cot_pi_rational, cot_table, harmonic, hurwitz_zeta2

logger = logging.getLogger(__name__)

GammaLike = Union[ProductWeights, float, Sequence[float]]

FOUR_PI_SQUARED = 4.0 * math.pi**2
EIGHT_PI_SQUARED = 8.0 * math.pi**2

# Rows of the Gram matrix processed at once by the O(M^2) oracles.
_ROW_BLOCK = 256


class WceBreakdown(BaseModel):
    """Squared wce in the unanchored Sobolev space, split into its three parts."""

    model_config = ConfigDict(frozen=True)

    sq_multilinear: float
    sq_korobov: float
    mixture: float
    sq_total: float

    @model_validator(mode="after")
    def _parts_add_up(self) -> "WceBreakdown":
        parts = math.fsum((self.sq_multilinear, self.sq_korobov, self.mixture))
        if abs(self.sq_total - parts) > 1e-13:
            raise NumericalConsistencyError(
                f"sq_total = {self.sq_total!r} differs from the sum of its parts {parts!r}"
            )
        if self.sq_total < -negative_clamp_tolerance:
            raise NumericalConsistencyError(f"negative squared worst-case error {self.sq_total!r}")
        return self

    @classmethod
    def from_parts(cls, sq_multilinear: float, sq_korobov: float, mixture: float) -> "WceBreakdown":
        return cls(
            sq_multilinear=sq_multilinear,
            sq_korobov=sq_korobov,
            mixture=mixture,
            sq_total=math.fsum((sq_multilinear, sq_korobov, mixture)),
        )

    @property
    def wce(self) -> float:
        return math.sqrt(max(self.sq_total, 0.0))


class MixturePair(BaseModel):
    """The two cotangent-sum halves of the two-dimensional mixture term."""

    model_config = ConfigDict(frozen=True)

    w1: int
    w2: int
    term_w1: float
    term_w2: float

    @property
    def total(self) -> float:
        return self.term_w1 + self.term_w2


class AverageIdentities(BaseModel):
    """Averages over w in {1, ..., N-1} next to their closed forms or bounds."""

    model_config = ConfigDict(frozen=True)

    N: int
    avg_cot2: float
    rhs_dedekind: float
    avg_S: float
    rhs_avg: float
    bound_avg_S: float
    avg_abscot: float
    bound_abscot: float
    avg_abs_cot: float
    bound_abs_cot: float


def product_weights(gamma: GammaLike, s: int) -> ProductWeights:
    """Weights for s dimensions; a scalar or a single value is broadcast."""
    if isinstance(gamma, ProductWeights):
        if gamma.s == 1 and s > 1:
            return ProductWeights.broadcast(gamma.gamma, s)
        gamma.check_dimension(s)
        return gamma
    return ProductWeights.broadcast(gamma, s)


def korobov_scale(convention: Union[KorobovConvention, str] = KorobovConvention.exact) -> float:
    """Factor turning Sobolev weights gamma into the Korobov weights of ``convention``."""
    return KorobovConvention(convention).b2_factor / TWO_PI_SQUARED


def check_closed_form_size(N: int) -> None:
    """Raises ProblemTooLarge when N is beyond ``closed_form_max_N``."""
    if N > closed_form_max_N:
        raise ProblemTooLarge(f"N = {N} exceeds the closed-form limit of {closed_form_max_N} points")


def _check_weight_sum(rule: WeightedRule) -> None:
    total = rule.weight_sum
    if abs(total - 1.0) > weight_sum_tolerance:
        raise WeightSumError(f"weights sum to {total!r}, not 1")


def _clamped(value: float, what: str) -> float:
    if value >= 0.0:
        return value
    if value >= -negative_clamp_tolerance:
        logger.debug("clamping %s = %.3e to zero", what, value)
        return 0.0
    raise NumericalConsistencyError(f"{what} = {value!r} is negative beyond rounding")


def _quadratic_form(rule: WeightedRule, pair_terms: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> float:
    """sum_{k,l} w_k w_l F(x_k, x_l) with F given on blocks of numerator rows.

    ``pair_terms(x_block, x_all)`` returns the (B, M) matrix of F values; each
    block is reduced with fsum and the block sums are combined with fsum, so
    the result does not depend on how the work is split.
    """
    numerators = rule.numerator_array()
    w = rule.weight_array()
    partial = []
    for start in range(0, rule.M, _ROW_BLOCK):
        rows = slice(start, start + _ROW_BLOCK)
        block = pair_terms(numerators[rows], numerators)
        partial.append(math.fsum((w[rows, None] * block * w[None, :]).ravel()))
    return math.fsum(partial)


def _sq_generic(rule: WeightedRule, kernel: Kernel, gamma: ProductWeights) -> float:
    # with int K(x, .) = 1: e^2 = sum w w (K - 1) + (sum w - 1)^2
    quadratic = _quadratic_form(
        rule, lambda x, y: gram_minus_one(kernel, x, rule.denominator, gamma, y)
    )
    excess = rule.weight_sum - 1.0
    return quadratic + excess * excess


def _kernel_of(kernel) -> Kernel:
    for name, function in KERNEL_FUNCTIONS.items():
        if kernel is function:
            return name
    return Kernel(kernel)


def wce_generic(rule: WeightedRule, kernel: Union[Kernel, str, Callable], gamma: GammaLike) -> float:
    """Worst-case error from the full kernel quadratic form.

    Args:
        rule: any cubature rule with rational nodes.
        kernel: ``Kernel`` member, its name, or one of the scalar kernel functions.
        gamma: product weights (a scalar is broadcast).

    Returns:
        sqrt(sum_{k,l} w_k w_l K(x_k, x_l) - 1).

    Raises:
        WeightSumError: when the weights do not sum to one.
        NumericalConsistencyError: when the squared error is negative beyond rounding.
    """
    _check_weight_sum(rule)
    kernel = _kernel_of(kernel)
    gamma = product_weights(gamma, rule.s)
    return math.sqrt(_clamped(_sq_generic(rule, kernel, gamma), f"{kernel.value} wce^2"))


def wce_korobov(rule: WeightedRule, gamma: GammaLike) -> float:
    """Korobov (alpha = 1) worst-case error of an arbitrary weighted rule."""
    return wce_generic(rule, Kernel.korobov1, gamma)


def _sq_korobov_lattice(rule: LatticeRule, gamma: ProductWeights) -> float:
    check_closed_form_size(rule.N)
    x = rule.numerators() / rule.N
    terms = 2.0 * math.pi**2 * gamma.as_array() * (x * x - x + 1.0 / 6.0)
    return math.fsum(prod_minus_one(terms)) / rule.N


def wce_korobov_lattice(rule: LatticeRule, gamma: GammaLike) -> float:
    """Korobov wce of the plain lattice rule in O(sN).

    (1/N) sum_k [prod_j (1 + 2 pi^2 gamma_j B_2({k z_j / N})) - 1]; vertex
    modification leaves this value unchanged.
    """
    gamma = product_weights(gamma, rule.s)
    return math.sqrt(_clamped(_sq_korobov_lattice(rule, gamma), "korobov wce^2"))


def _sq_multilinear(rule: WeightedRule, gamma: ProductWeights) -> float:
    # sum over nonempty u of prod_{j in u} 12 gamma_j * (sum_k w_k prod_{j in u} B_1(x_kj))^2
    b1 = rule.point_array() - 0.5
    w = rule.weight_array()
    total = []
    for size in range(1, rule.s + 1):
        for u in itertools.combinations(range(rule.s), size):
            moment = math.fsum(w * np.prod(b1[:, u], axis=1))
            total.append(math.prod(12.0 * gamma[j] for j in u) * moment * moment)
    return math.fsum(total)


def wce_multilinear(rule: WeightedRule, gamma: GammaLike) -> float:
    """Multilinear-space wce from weighted B_1 moments, O(M 2^s).

    Raises:
        WeightSumError: when the weights do not sum to one.
    """
    _check_weight_sum(rule)
    gamma = product_weights(gamma, rule.s)
    return math.sqrt(_sq_multilinear(rule, gamma))


def _mixture_terms(x: np.ndarray, y: np.ndarray, denominator: int, gamma: ProductWeights) -> np.ndarray:
    # Every dimension is absent, a B_1 B_1 factor or a B_2 / 2 factor;
    # only assignments using both factor kinds belong to the mixture.
    g = gamma.as_array()
    linear = g * pairwise_b1(x, y, denominator)
    periodic = g * pairwise_b2(x, y, denominator) / 2.0
    s = x.shape[1]
    total = np.zeros(linear.shape[:2])
    for states in itertools.product(range(3), repeat=s):
        if 1 not in states or 2 not in states:
            continue
        term = np.ones(linear.shape[:2])
        for j, state in enumerate(states):
            if state == 1:
                term = term * linear[..., j]
            elif state == 2:
                term = term * periodic[..., j]
        total = total + term
    return total


def wce_decomposition(rule: WeightedRule, gamma: GammaLike) -> WceBreakdown:
    """Split the unanchored Sobolev squared wce into three parts.

    sq_multilinear uses weights gamma/12, sq_korobov uses gamma/(2 pi)^2 and
    the mixture collects every product that has at least one B_1 B_1 factor
    and at least one B_2 factor. The mixture is enumerated directly in
    O(M^2 3^s).

    Raises:
        WeightSumError: when the weights do not sum to one.
    """
    _check_weight_sum(rule)
    gamma = product_weights(gamma, rule.s)
    sq_multilinear = _sq_multilinear(rule, gamma.scaled(1.0 / 12.0))
    sq_korobov = _clamped(
        _sq_generic(rule, Kernel.korobov1, gamma.scaled(korobov_scale())), "korobov wce^2"
    )
    mixture = 0.0
    if rule.s > 1:
        mixture = _quadratic_form(rule, lambda x, y: _mixture_terms(x, y, rule.denominator, gamma))
    breakdown = WceBreakdown.from_parts(sq_multilinear, sq_korobov, mixture)
    logger.debug("decomposition M=%d s=%d: %s", rule.M, rule.s, breakdown)
    return breakdown


def exp_b1_sum(z: int, theta: int, N: int) -> complex:
    """(1/N) sum_{k=1}^{N-1} B_1({z k / N}) exp(2 pi i theta k / N) in closed form.

    Zero for theta = 0 (mod N), otherwise -i cot(pi z^-1 theta / N) / (2N).

    Raises:
        NotInvertible: when gcd(z, N) != 1.
    """
    z_inv = mod_inverse(z, N)
    if theta % N == 0:
        return 0j
    return complex(0.0, -cot_pi_rational(z_inv * theta, N) / (2.0 * N))


def exp_b1_sum_direct(z: int, theta: int, N: int) -> complex:
    """The defining N-1 term sum, evaluated term by term."""
    if gcd(z % N, N) != 1:
        raise NotInvertible(f"{z} is not invertible modulo {N}")
    k = np.arange(1, N)
    b1 = (z * k % N) / N - 0.5
    angle = 2.0 * math.pi * ((theta * k) % N) / N
    return complex(math.fsum(b1 * np.cos(angle)) / N, math.fsum(b1 * np.sin(angle)) / N)


def _coprime_multiples(w: int, N: int) -> tuple[np.ndarray, np.ndarray]:
    if N < 2:
        raise DomainError(f"modulus N = {N} must be at least 2")
    check_closed_form_size(N)
    if gcd(w % N, N) != 1:
        raise NotInvertible(f"w = {w} is not coprime to N = {N}")
    h = np.arange(1, N)
    return h, cot_table(N)[(h * (w % N)) % N]


def cot2_sum_truncated(w: int, N: int) -> float:
    """(1/N^2) sum_{h=1}^{N-1} cot^2(pi h w / N) / h^2."""
    h, cot = _coprime_multiples(w, N)
    return math.fsum(cot * cot / (h * h)) / N**2


def cot2_sum_exact(w: int, N: int) -> float:
    """(1/N^2) sum over all h >= 1, h != 0 (mod N), of cot^2(pi h w / N) / h^2.

    The tail over h + lN is folded into zeta(2, h/N) / N^2, so only N - 1
    terms are summed.
    """
    h, cot = _coprime_multiples(w, N)
    tail = hurwitz_zeta2(h / N) / N**2
    return math.fsum(cot * cot * tail) / N**2


def abscot_sum(w: int, N: int) -> float:
    """(1/N) sum_{h=1}^{N-1} |cot(pi h w / N)| / h."""
    h, cot = _coprime_multiples(w, N)
    return math.fsum(np.abs(cot) / h) / N


def _two_dimensional(rule: LatticeRule) -> None:
    if rule.s != 2:
        raise DimensionError(f"closed forms are two-dimensional, got s = {rule.s}")


def _mixture_generators(rule: LatticeRule) -> tuple[int, int]:
    z1, z2 = rule.z
    N = rule.N
    return mod_inverse(z1, N) * z2 % N, mod_inverse(z2, N) * z1 % N


def mixture_term_s2(rule: LatticeRule, gamma: GammaLike) -> MixturePair:
    """Mixture term of the optimal vertex modified rule for s = 2.

    With w_1 = z_1^-1 z_2 and w_2 = z_2^-1 z_1 (mod N) each half is
    gamma_1 gamma_2 / (8 pi^2) * cot2_sum_exact(w_j, N).

    Raises:
        DimensionError: when the rule is not two-dimensional.
    """
    _two_dimensional(rule)
    gamma = product_weights(gamma, 2)
    w1, w2 = _mixture_generators(rule)
    c = gamma[0] * gamma[1] / EIGHT_PI_SQUARED
    return MixturePair(
        w1=w1,
        w2=w2,
        term_w1=c * cot2_sum_exact(w1, rule.N),
        term_w2=c * cot2_sum_exact(w2, rule.N),
    )


def mixture_bounds_s2(rule: LatticeRule, gamma: GammaLike) -> tuple[float, float]:
    """Lower and upper bounds on the s = 2 mixture from the truncated cot^2 sums.

    Returns:
        (lower, upper) with upper / lower = pi^2 / 6.
    """
    _two_dimensional(rule)
    gamma = product_weights(gamma, 2)
    truncated = math.fsum(cot2_sum_truncated(w, rule.N) for w in _mixture_generators(rule))
    g = gamma[0] * gamma[1]
    return g / EIGHT_PI_SQUARED * truncated, g / 48.0 * truncated


def sqrt_wce_bound_s2(rule: LatticeRule, gamma: GammaLike) -> float:
    """Upper bound on the Sobolev wce of the optimal rule through |cot| sums."""
    _two_dimensional(rule)
    gamma = product_weights(gamma, 2)
    korobov = wce_korobov_lattice(rule, gamma.scaled(korobov_scale()))
    abscot = math.fsum(abscot_sum(w, rule.N) for w in _mixture_generators(rule))
    return korobov + math.sqrt(gamma[0] * gamma[1] / 48.0) * abscot


def wce_trapezoid_1d(N: int, gamma1: float) -> float:
    """sqrt(gamma_1 / 12) / N, the Sobolev wce of the one-dimensional trapezoidal rule."""
    if N < 1:
        raise DomainError(f"N = {N} must be positive")
    if not gamma1 > 0:
        raise DomainError(f"gamma_1 = {gamma1} must be positive")
    return math.sqrt(gamma1 / 12.0) / N


def _odd_prime(N: int) -> None:
    if N < 3:
        raise DomainError(f"N = {N} must be an odd prime")
    require_prime(N)


def average_identities(N: int) -> AverageIdentities:
    """Averages of cot^2, of the cot^2 sums and of the |cot| sums over w.

    Raises:
        NotPrime: when N is composite.
    """
    _odd_prime(N)
    table = cot_table(N)
    h = np.arange(1, N)
    cot = table[1:]
    # rows h, columns w
    products = table[np.outer(h, h) % N]
    inv_h = 1.0 / h[:, None]
    count = N - 1
    log_n = math.log(N)
    return AverageIdentities(
        N=N,
        avg_cot2=math.fsum(cot * cot) / count,
        rhs_dedekind=(N - 2) / 3.0,
        avg_S=math.fsum((products * products * inv_h * inv_h).ravel()) / (N**2 * count),
        rhs_avg=(N - 2) / (3.0 * N**2) * harmonic(N - 1, 2.0),
        bound_avg_S=math.pi**2 / (18.0 * N),
        avg_abscot=math.fsum((np.abs(products) * inv_h).ravel()) / (N * count),
        bound_abscot=harmonic(N - 1, 1.0) / N * (6.0 / math.pi) * log_n,
        avg_abs_cot=math.fsum(np.abs(cot)) / count,
        bound_abs_cot=3.0 / math.pi * math.log(3.0 * N),
    )


def existence_bound(N: int, gamma: GammaLike, kor_wce: float) -> float:
    """Value that some generator w is guaranteed to beat for prime N.

    kor_wce + 11 sqrt(2 gamma_1 gamma_2) / (pi sqrt(48) log 3) * log^2(N) / N.

    Raises:
        NotPrime: when N is composite.
        DimensionError: unless the weights are two-dimensional.
    """
    _odd_prime(N)
    gamma = product_weights(gamma, 2)
    c = 11.0 * math.sqrt(2.0 * gamma[0] * gamma[1]) / (math.pi * math.sqrt(48.0) * math.log(3.0))
    return kor_wce + c * math.log(N) ** 2 / N


def conjecture_double_sum(z: int, N: int) -> float:
    """sum_{k,l=1}^{N-1} B_1(k/N) B_2({z (k - l) / N}) B_1(l/N) through the cot^2 identity.

    Equals N^2 / (4 pi^2) * cot2_sum_exact(z, N).
    """
    return N * N / FOUR_PI_SQUARED * cot2_sum_exact(z, N)


def conjecture_double_sum_direct(z: int, N: int) -> float:
    """The same double sum evaluated term by term, O(N^2)."""
    if gcd(z % N, N) != 1:
        raise NotInvertible(f"z = {z} is not coprime to N = {N}")
    k = np.arange(1, N)
    b1 = k / N - 0.5
    d = np.mod(z * (k[:, None] - k[None, :]), N) / N
    b2 = d * d - d + 1.0 / 6.0
    return math.fsum((b1[:, None] * b2 * b1[None, :]).ravel())


def check_conjecture(z: int, N: int) -> float:
    """|D(z) - D(z^-1)| for the double sum D, via the O(N) route.

    Raises:
        NotInvertible: when gcd(z, N) != 1.
    """
    z_inv = mod_inverse(z, N)
    return abs(conjecture_double_sum(z, N) - conjecture_double_sum(z_inv, N))


def check_conjecture_direct(z: int, N: int) -> float:
    """|D(z) - D(z^-1)| with both double sums evaluated term by term."""
    z_inv = mod_inverse(z, N)
    return abs(conjecture_double_sum_direct(z, N) - conjecture_double_sum_direct(z_inv, N))


def conjecture_deviations(N: int, block: int = 512) -> pd.Series:
    """|D(z) - D(z^-1)| for every z in {1, ..., N-1} coprime to N.

    Returns:
        Series of deviations indexed by z.
    """
    if N < 3:
        raise DomainError(f"N = {N} must be at least 3")
    table = cot_table(N)
    h = np.arange(1, N)
    tail = hurwitz_zeta2(h / N) / N**2
    generators = np.array([z for z in range(1, N) if gcd(z, N) == 1], dtype=np.int64)
    sums = np.empty(len(generators))
    for start in range(0, len(generators), block):
        chunk = generators[start : start + block]
        cot = table[np.outer(chunk, h) % N]
        sums[start : start + block] = (cot * cot) @ tail
    position = {int(z): i for i, z in enumerate(generators)}
    inverse = np.array([position[pow(int(z), -1, N)] for z in generators])
    scale = 1.0 / FOUR_PI_SQUARED
    deviations = scale * np.abs(sums - sums[inverse])
    return pd.Series(deviations, index=pd.Index(generators, name="z"), name="deviation")
