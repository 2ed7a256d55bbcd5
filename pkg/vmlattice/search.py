"""Generator search for two-dimensional optimal vertex modified lattice rules.

For prime N every z in {1, ..., N-1} is a power g^beta of a primitive root.
Re-indexing the h-sums of the Korobov and mixture terms by exponents turns
them into cyclic convolutions of length N - 1, so the errors of all N - 1
generators come out of one FFT each.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, Optional, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from .config import KorobovConvention, direct_convolution_threshold, fibonacci_halves_rtol
from .errors import DomainError, LengthMismatch, NumericalConsistencyError
from .formats import PLOT_COLUMNS, SEARCH_COLUMNS
from .numtheory import fibonacci, primitive_root, require_prime
from .rules import LatticeRule
from .special import cot_table, hurwitz_zeta2
from .wce import (
    EIGHT_PI_SQUARED,
    GammaLike,
    WceBreakdown,
    check_closed_form_size,
    korobov_scale,
    mixture_term_s2,
    product_weights,
    wce_korobov_lattice,
)

logger = logging.getLogger(__name__)


def cyclic_convolution_direct(a: Sequence[float], b: Sequence[float]) -> np.ndarray:
    """c[beta] = sum_gamma a[(beta - gamma) mod L] b[gamma], O(L^2)."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise LengthMismatch(f"cannot convolve vectors of shapes {a.shape} and {b.shape}")
    L = len(a)
    index = (np.arange(L)[:, None] - np.arange(L)[None, :]) % L
    return (a[index] * b[None, :]).sum(axis=1)


def cyclic_convolution(a: Sequence[float], b: Sequence[float]) -> np.ndarray:
    """Cyclic convolution of two equal-length real vectors of any length.

    Short vectors go through the direct sum. Longer ones are zero padded to
    a power of two of at least 2L - 1, convolved linearly with the real FFT
    and folded back modulo L.

    Raises:
        LengthMismatch: when the lengths differ.
    """
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise LengthMismatch(f"cannot convolve vectors of shapes {a.shape} and {b.shape}")
    L = len(a)
    if L <= direct_convolution_threshold:
        return cyclic_convolution_direct(a, b)
    size = 1 << (2 * L - 2).bit_length()
    linear = np.fft.irfft(np.fft.rfft(a, size) * np.fft.rfft(b, size), size)
    result = linear[:L].copy()
    result[: L - 1] += linear[L : 2 * L - 1]
    return result


class GroupIndexedVector(BaseModel):
    """Exponent indexing of the multiplicative group modulo a prime N.

    ``residues[beta]`` is g^beta mod N and ``inverse_residues[beta]`` is
    g^-beta mod N; both are permutations of 1..N-1.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    N: int
    g: int
    residues: np.ndarray
    inverse_residues: np.ndarray

    @property
    def length(self) -> int:
        return self.N - 1

    def inverse_index(self) -> np.ndarray:
        """Position of z^-1 for the z at each position: (-beta) mod (N - 1)."""
        return (-np.arange(self.length)) % self.length

    def by_residue(self, values: np.ndarray, name: str) -> pd.Series:
        """Exponent-indexed ``values`` re-keyed by z = g^beta, sorted by z."""
        series = pd.Series(values, index=pd.Index(self.residues, name="z"), name=name)
        return series.sort_index()


def group_vector(N: int) -> GroupIndexedVector:
    """Exponent indexing for the prime N, built on its smallest primitive root."""
    g = primitive_root(N)
    residues = np.empty(N - 1, dtype=np.int64)
    value = 1
    for beta in range(N - 1):
        residues[beta] = value
        value = value * g % N
    inverse = np.empty_like(residues)
    inverse[0] = 1
    inverse[1:] = residues[1:][::-1]
    return GroupIndexedVector(N=N, g=g, residues=residues, inverse_residues=inverse)


def all_z_mixture(N: int, gamma: GammaLike = 1.0) -> pd.Series:
    """Two-dimensional mixture term of the optimal rule for every z = (1, z).

    a[delta] = cot^2(pi g^delta / N) and b[gamma] = zeta(2, g^-gamma / N) / N^2
    convolve to N^2 cot2_sum_exact(g^beta, N); the mixture adds the value at
    z and at z^-1.

    Raises:
        NotPrime: when N is composite.
    """
    _odd_prime(N)
    gamma = product_weights(gamma, 2)
    group = group_vector(N)
    cot = cot_table(N)[group.residues]
    a = cot * cot
    b = hurwitz_zeta2(group.inverse_residues / N) / N**2
    exact = cyclic_convolution(a, b) / N**2
    mixture = gamma[0] * gamma[1] / EIGHT_PI_SQUARED * (exact + exact[group.inverse_index()])
    return group.by_residue(mixture, "mixture")


def all_z_korobov(
    N: int, gamma: GammaLike = 1.0, convention: Union[KorobovConvention, str] = KorobovConvention.exact
) -> pd.Series:
    """Korobov wce^2 of the lattice rule for every z = (1, z).

    With kernel factors 1 + c gamma_j B_2 (c = 1/2 for the exact part of the
    Sobolev error, c = 1 for the table convention) this is
    c (gamma_1 + gamma_2) / (6 N^2) + c^2 gamma_1 gamma_2 / N [1/36 + sum_k
    B_2(k/N) B_2({kz/N})], the k-sum being a convolution over exponents.

    Raises:
        NotPrime: when N is composite.
    """
    _odd_prime(N)
    convention = KorobovConvention(convention)
    c = convention.b2_factor
    gamma = product_weights(gamma, 2)
    group = group_vector(N)
    x = group.residues / N
    y = group.inverse_residues / N
    cross = cyclic_convolution(x * x - x + 1.0 / 6.0, y * y - y + 1.0 / 6.0)
    single = c * (gamma[0] + gamma[1]) / (6.0 * N**2)
    korobov = single + c * c * gamma[0] * gamma[1] / N * (1.0 / 36.0 + cross)
    name = "wce2_korobov" if convention is KorobovConvention.exact else "wce2_korobov_table"
    return group.by_residue(korobov, name)


def _odd_prime(N: int) -> None:
    if N < 3:
        raise DomainError(f"N = {N} must be an odd prime")
    check_closed_form_size(N)
    require_prime(N)


class SearchResult(BaseModel):
    """Best generator (1, z_best) for one prime N and its squared errors.

    ``sq_total`` and ``sq_korobov`` are exact parts of the Sobolev error;
    ``sq_korobov_table`` and ``sq_total_table`` repeat them with the table
    convention for the Korobov part.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    N: int
    z_best: int
    sq_total: float
    sq_korobov: float
    mixture: float
    sq_total_table: float
    sq_korobov_table: float
    all_rows: Optional[pd.DataFrame] = Field(default=None, exclude=True)

    @property
    def wce(self) -> float:
        return math.sqrt(self.sq_total)

    def as_row(self) -> dict:
        values = (
            self.N,
            self.z_best,
            self.sq_total,
            self.sq_korobov,
            self.mixture,
            self.sq_total_table,
            self.sq_korobov_table,
        )
        return dict(zip(SEARCH_COLUMNS, values))


def best_generator(N: int, gamma: GammaLike = 1.0, full: bool = False) -> SearchResult:
    """Generator z minimising the Sobolev wce of the optimal rule with z = (1, z).

    Generators are ranked by the exact Sobolev error; ties go to the smallest
    z. The table-convention columns are reported for the same z.

    Args:
        N: prime number of lattice points.
        gamma: two-dimensional product weights.
        full: keep the per-z table in ``all_rows``.

    Raises:
        NotPrime: when N is composite.
    """
    korobov = all_z_korobov(N, gamma)
    korobov_table = all_z_korobov(N, gamma, KorobovConvention.table)
    mixture = all_z_mixture(N, gamma)
    total = korobov + mixture
    total_table = korobov_table + mixture
    z_best = int(total.idxmin())
    logger.debug("N=%d: best z=%d among %d generators", N, z_best, len(total))
    rows = None
    if full:
        rows = pd.DataFrame(
            {
                "N": N,
                "z": total.index,
                "wce2_total": total.to_numpy(),
                "wce2_korobov": korobov.to_numpy(),
                "mixture": mixture.to_numpy(),
                "wce2_total_table": total_table.to_numpy(),
                "wce2_korobov_table": korobov_table.to_numpy(),
            },
            columns=SEARCH_COLUMNS,
        )
    return SearchResult(
        N=N,
        z_best=z_best,
        sq_total=float(total[z_best]),
        sq_korobov=float(korobov[z_best]),
        mixture=float(mixture[z_best]),
        sq_total_table=float(total_table[z_best]),
        sq_korobov_table=float(korobov_table[z_best]),
        all_rows=rows,
    )


def fibonacci_lattice(k: int) -> LatticeRule:
    """Two-dimensional Fibonacci lattice: N = F_k, z = (1, F_{k-1})."""
    if k < 4:
        raise DomainError(f"Fibonacci rules need k >= 4, got k = {k}")
    return LatticeRule(z=(1, fibonacci(k - 1)), N=fibonacci(k))


def fibonacci_rule(k: int, gamma: GammaLike = 1.0) -> WceBreakdown:
    """Breakdown of the optimal vertex modified Fibonacci rule.

    N = F_k need not be prime, so the O(N) closed forms are used instead of
    the group search. The two mixture halves coincide because F_{k-1} is its
    own inverse up to sign modulo F_k.

    Raises:
        DomainError: for k < 4.
        ProblemTooLarge: when F_k exceeds the closed-form limit.
        FibonacciOverflow: when F_k leaves the 64-bit range.
        NumericalConsistencyError: when the mixture halves disagree.
    """
    rule = fibonacci_lattice(k)
    check_closed_form_size(rule.N)
    gamma = product_weights(gamma, 2)
    pair = mixture_term_s2(rule, gamma)
    if not math.isclose(pair.term_w1, pair.term_w2, rel_tol=fibonacci_halves_rtol):
        raise NumericalConsistencyError(
            f"k = {k}: mixture halves {pair.term_w1!r} and {pair.term_w2!r} differ"
        )
    korobov = wce_korobov_lattice(rule, gamma.scaled(korobov_scale()))
    return WceBreakdown.from_parts(0.0, korobov * korobov, pair.total)


def reproduce_table(primes: Iterable[int], gamma: GammaLike = 1.0, jobs: int = 1, full: bool = False) -> list[SearchResult]:
    """Run ``best_generator`` for every N, in input order.

    Raises:
        NotPrime: for the first composite N, before any search starts.
    """
    primes = list(primes)
    for N in primes:
        _odd_prime(N)
    gamma = product_weights(gamma, 2)

    def search(N: int) -> SearchResult:
        result = best_generator(N, gamma, full=full)
        logger.info("N=%d z=%d wce^2=%.5e", N, result.z_best, result.sq_total)
        return result

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as executor:
        return list(executor.map(search, primes))


def table_frame(results: Sequence[SearchResult], full: bool = False) -> pd.DataFrame:
    """One row per N, or every generator of every N when ``full`` is set."""
    if full:
        frames = [r.all_rows for r in results if r.all_rows is not None]
        if frames:
            return pd.concat(frames, ignore_index=True)
    return pd.DataFrame([r.as_row() for r in results], columns=SEARCH_COLUMNS)


def plot_frame(results: Sequence[SearchResult]) -> pd.DataFrame:
    """sqrt of the optimal wce^2 and of its mixture part next to sqrt(log N)/N and log^2(N)/N."""
    N = np.array([r.N for r in results], dtype=float)
    sqrt_total = np.sqrt([r.sq_total for r in results])
    sqrt_total_table = np.sqrt([r.sq_total_table for r in results])
    sqrt_mixture = np.sqrt([r.mixture for r in results])
    ref_loghalf = np.sqrt(np.log(N)) / N
    frame = pd.DataFrame(
        {
            "N": [r.N for r in results],
            "sqrt_sq_total": sqrt_total,
            "sqrt_sq_total_table": sqrt_total_table,
            "sqrt_mixture": sqrt_mixture,
            "ref_loghalf": ref_loghalf,
            "ref_log2": np.log(N) ** 2 / N,
            "ratio_loghalf": sqrt_mixture / ref_loghalf,
        },
        columns=PLOT_COLUMNS,
    )
    return frame
