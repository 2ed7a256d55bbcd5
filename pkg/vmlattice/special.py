"""Special functions used by the kernels and the closed-form error expressions.

Bernoulli polynomials of degree one and two, harmonic numbers, the Hurwitz
zeta function at s = 2 and cotangents at rational multiples of pi.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

import numpy as np

from .errors import DomainError, PoleError

# A node coordinate k/N in [0, 1), kept exact.
RationalNode = Fraction

Real = Union[float, int, Fraction]
ArrayOrReal = Union[Real, np.ndarray]

# B_2, B_4, ..., B_14: tail of the Euler-Maclaurin expansion of zeta(2, x).
_EM_BERNOULLI = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6)
_ZETA_LIFT = 10


def rational_node(numerator: int, denominator: int) -> RationalNode:
    """The node numerator/denominator, with 0 <= numerator < denominator."""
    if denominator < 1 or not 0 <= numerator < denominator:
        raise DomainError(f"{numerator}/{denominator} is not a node in [0, 1)")
    return Fraction(numerator, denominator)


def _unit_interval(t: ArrayOrReal, name: str) -> Union[float, np.ndarray]:
    if isinstance(t, np.ndarray):
        values = t.astype(float, copy=False)
        if values.size and (values.min() < 0.0 or values.max() > 1.0):
            raise DomainError(f"{name} needs arguments in [0, 1]")
        return values
    value = float(t)
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name}({t}) is outside [0, 1]")
    return value


def bernoulli1(t: ArrayOrReal) -> Union[float, np.ndarray]:
    """B_1(t) = t - 1/2 on [0, 1]."""
    t = _unit_interval(t, "bernoulli1")
    return t - 0.5


def bernoulli2(t: ArrayOrReal) -> Union[float, np.ndarray]:
    """B_2(t) = t^2 - t + 1/6 on [0, 1]."""
    t = _unit_interval(t, "bernoulli2")
    return t * t - t + 1.0 / 6.0


def harmonic(N: int, a: float = 1.0) -> float:
    """Harmonic number H_N(a) = sum_{h=1}^N h^-a, summed from the smallest term."""
    if N < 1:
        raise DomainError(f"harmonic number needs N >= 1, got {N}")
    h = np.arange(N, 0, -1, dtype=float)
    return math.fsum(h**-a)


def harmonic_log_bound(N: int) -> float:
    """Upper envelope (11 / (6 log 3)) log N of H_N(1), valid for N >= 3."""
    if N < 3:
        raise DomainError(f"the logarithmic bound on H_N(1) needs N >= 3, got {N}")
    return 11.0 / (6.0 * math.log(3.0)) * math.log(N)


def _zeta2_tail(x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    # Euler-Maclaurin for zeta(2, x), x >= 10; the series terms are B_2k x^(-2k-1).
    inv = 1.0 / x
    inv2 = inv * inv
    series = 0.0
    power = inv2 * inv
    for b in _EM_BERNOULLI:
        series = series + b * power
        power = power * inv2
    return inv + 0.5 * inv2 + series


def hurwitz_zeta2(a: ArrayOrReal) -> Union[float, np.ndarray]:
    """Hurwitz zeta(2, a) = sum_{l >= 0} (l + a)^-2.

    The argument is lifted by zeta(2, a) = zeta(2, a + 1) + a^-2 ten times
    and the remainder evaluated by its asymptotic expansion; on (0, 1] the
    relative error stays below 1e-13.

    Raises:
        DomainError: for a <= 0.
    """
    scalar = not isinstance(a, np.ndarray)
    x = np.asarray(a, dtype=float) if not scalar else float(a)
    if np.any(np.asarray(x) <= 0.0):
        raise DomainError(f"hurwitz_zeta2 needs a > 0, got {a}")
    total = _zeta2_tail(x + _ZETA_LIFT)
    for lift in range(_ZETA_LIFT - 1, -1, -1):
        total = total + 1.0 / ((x + lift) * (x + lift))
    return float(total) if scalar else total


def _reduced_cot(r: int, N: int) -> float:
    # cot(pi r / N) for 0 < r < N, evaluated on the half-turn (0, pi/2].
    if 2 * r > N:
        return -_reduced_cot(N - r, N)
    if 2 * r == N:
        return 0.0
    theta = math.pi * r / N
    return math.cos(theta) / math.sin(theta)


def cot_pi_rational(k: int, N: int) -> float:
    """cot(pi * k / N) computed after reducing k modulo N.

    Raises:
        PoleError: when k = 0 (mod N).
    """
    if N < 1:
        raise DomainError(f"modulus N = {N} must be positive")
    r = k % N
    if r == 0:
        raise PoleError(f"cot(pi * {k} / {N}) is a pole")
    return _reduced_cot(r, N)


def cot_table(N: int) -> np.ndarray:
    """Vector c with c[r] = cot(pi r / N) for r = 0..N-1 and c[0] = nan.

    Mirrored entries are exact negatives of each other, so c[r]**2 and
    c[N - r]**2 agree bit for bit.
    """
    if N < 2:
        raise DomainError(f"cot_table needs N >= 2, got {N}")
    half = np.arange(1, N // 2 + 1)
    theta = np.pi * half / N
    values = np.cos(theta) / np.sin(theta)
    table = np.empty(N, dtype=float)
    table[0] = np.nan
    table[half] = values
    table[N - half] = -values
    if N % 2 == 0:
        table[N // 2] = 0.0
    return table
