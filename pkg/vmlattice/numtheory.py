"""Exact integer number theory for lattice rules.

Everything here works on plain Python integers. The moduli of interest stay
below 2**20, so every product of two residues is far inside 64 bits.
"""

from __future__ import annotations

import math

from .config import int64_max
from .errors import DomainError, FibonacciOverflow, NotInvertible, NotPrime

# Deterministic Miller-Rabin witnesses, valid for every n < 3.3e24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def gcd(a: int, b: int) -> int:
    """Greatest common divisor, always non-negative; gcd(0, 0) = 0."""
    return math.gcd(a, b)


def mod_inverse(a: int, N: int) -> int:
    """Multiplicative inverse of ``a`` modulo ``N`` in {1, ..., N-1}.

    Raises:
        NotInvertible: when gcd(a, N) != 1.
    """
    if N < 2:
        raise DomainError(f"modulus N = {N} must be at least 2")
    if gcd(a % N, N) != 1:
        raise NotInvertible(f"{a} is not invertible modulo {N} (gcd = {gcd(a % N, N)})")
    return pow(a, -1, N)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def require_prime(N: int) -> None:
    if not is_prime(N):
        raise NotPrime(f"N = {N} is not prime")


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``n`` by trial division, ascending."""
    if n < 1:
        raise DomainError(f"cannot factor {n}")
    factors = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            factors.append(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        factors.append(n)
    return factors


def primitive_root(N: int) -> int:
    """Smallest generator of the multiplicative group modulo the prime ``N``.

    Raises:
        NotPrime: when N is composite.
        DomainError: when N < 3.
    """
    if N < 3:
        raise DomainError(f"primitive_root needs an odd prime, got N = {N}")
    require_prime(N)
    exponents = [(N - 1) // q for q in prime_factors(N - 1)]
    for g in range(2, N):
        if all(pow(g, e, N) != 1 for e in exponents):
            return g
    raise AssertionError(f"no primitive root found for prime {N}")


def primes_in_range(lo: int, hi: int) -> list[int]:
    """All primes p with lo <= p <= hi."""
    return [n for n in range(max(lo, 2), hi + 1) if is_prime(n)]


def fibonacci(k: int) -> int:
    """k-th Fibonacci number with F_0 = 0 and F_1 = 1.

    Raises:
        DomainError: for negative k.
        FibonacciOverflow: when F_k exceeds the signed 64-bit range.
    """
    if k < 0:
        raise DomainError(f"Fibonacci index k = {k} must be non-negative")
    a, b = 0, 1
    for _ in range(k):
        a, b = b, a + b
        if a > int64_max:
            raise FibonacciOverflow(f"F_{k} exceeds the 64-bit integer range")
    return a


def fibonacci_inverse_sign(k: int) -> int:
    """Sign s with F_{k-1}^{-1} = s * F_{k-1} (mod F_k), for k >= 3."""
    if k < 3:
        raise DomainError(f"k = {k}: the Fibonacci inverse identity needs k >= 3")
    return 1 if k % 2 == 0 else -1
