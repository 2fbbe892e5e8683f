"""Elementary number theory: primes, the Moebius function and rigorous
enclosures of the Euler products prod_{p >= k} (1 - k/p^2)."""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from mpmath import iv, libmp

__all__ = [
    "Interval",
    "euler_cutoff",
    "euler_product",
    "is_prime",
    "mobius",
    "mobius_sieve",
    "prime_factors",
    "primes_below",
    "totient",
    "weighted_mobius_sum",
]


def primes_below(limit):
    """Primes p < limit in increasing order (sieve of Eratosthenes)."""
    limit = int(limit)
    if limit < 3:
        return []
    sieve = np.ones(limit, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for p in range(3, math.isqrt(limit - 1) + 1, 2):
        if sieve[p]:
            sieve[p * p :: 2 * p] = False
    return np.flatnonzero(sieve).tolist()


@lru_cache(maxsize=32)
def _primes_tuple(limit: int) -> tuple[int, ...]:
    return tuple(primes_below(limit))


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def prime_factors(n: int) -> dict[int, int]:
    """Trial-division factorization of a positive integer, {prime: exponent}."""
    if n < 1:
        raise ValueError(f"cannot factor {n}: need a positive integer")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def mobius(n: int) -> int:
    if n < 1:
        raise ValueError(f"mobius is defined for n >= 1, got {n}")
    exps = prime_factors(n)
    if any(e > 1 for e in exps.values()):
        return 0
    return -1 if len(exps) % 2 else 1


def mobius_sieve(n: int) -> np.ndarray:
    """mu(0..n) as an int8 array; entry 0 is set to 0."""
    mu = np.ones(n + 1, dtype=np.int8)
    mu[0] = 0
    for p in primes_below(n + 1):
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu


def totient(n: int) -> int:
    result = n
    for p in prime_factors(n):
        result -= result // p
    return result


def weighted_mobius_sum(n: int) -> Fraction:
    """Exact value of sum_{d <= n} mu(d)/d * floor(n/d).

    Grows like 6n/pi^2 + O(log n).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    mu = mobius_sieve(n)
    # common denominator lcm(1..n) keeps the sum in integers
    den = math.lcm(*range(1, n + 1))
    num = 0
    for d in range(1, n + 1):
        if mu[d]:
            num += int(mu[d]) * (den // d) * (n // d)
    return Fraction(num, den)


def _to_fraction(mpf_value) -> Fraction:
    p, q = libmp.to_rational(mpf_value)
    return Fraction(int(p), int(q))


@dataclass(frozen=True)
class Interval:
    """Closed interval with exact rational endpoints."""

    lower: Fraction
    upper: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lower", Fraction(self.lower))
        object.__setattr__(self, "upper", Fraction(self.upper))
        if self.lower > self.upper:
            raise ValueError(f"empty interval [{self.lower}, {self.upper}]")

    @classmethod
    def point(cls, value) -> Interval:
        return cls(value, value)

    @classmethod
    def from_iv(cls, x) -> Interval:
        lo, hi = x._mpi_
        return cls(_to_fraction(lo), _to_fraction(hi))

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    @property
    def midpoint(self) -> Fraction:
        return (self.lower + self.upper) / 2

    def contains(self, value) -> bool:
        if isinstance(value, Interval):
            return self.lower <= value.lower and value.upper <= self.upper
        value = Fraction(value)
        return self.lower <= value <= self.upper

    def overlaps(self, other: Interval) -> bool:
        return self.lower <= other.upper and other.lower <= self.upper

    def __add__(self, other):
        other = _as_interval(other)
        return Interval(self.lower + other.lower, self.upper + other.upper)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.upper, -self.lower)

    def __sub__(self, other):
        return self + (-_as_interval(other))

    def __rsub__(self, other):
        return _as_interval(other) - self

    def __mul__(self, other):
        other = _as_interval(other)
        products = [
            self.lower * other.lower,
            self.lower * other.upper,
            self.upper * other.lower,
            self.upper * other.upper,
        ]
        return Interval(min(products), max(products))

    __rmul__ = __mul__

    def __float__(self):
        return float(self.midpoint)

    def __str__(self):
        return f"[{float(self.lower):.12g}, {float(self.upper):.12g}]"


def _as_interval(value) -> Interval:
    if isinstance(value, Interval):
        return value
    return Interval.point(value)


@contextmanager
def _iv_precision(bits: int):
    saved = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = saved


def euler_cutoff(k: int, tolerance: float) -> int:
    """Prime cutoff P used by :func:`euler_product` for (k, tolerance).

    Chosen so that the tail correction exp(-k^2 / (3 (P-1)^3)) costs at most
    a quarter of the tolerance.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not tolerance > 0:
        raise ValueError(f"tolerance must be positive, got {tolerance}")
    tol = Fraction(tolerance)
    need = 4 * k * k / (3 * tol)
    root = int(round(float(need) ** (1 / 3)))
    while Fraction(root) ** 3 < need:
        root += 1
    return max(k + 1, 100, root + 1)


def _zeta2_interval(bits: int) -> Interval:
    with _iv_precision(bits):
        return Interval.from_iv(iv.pi**2 / 6)


def _reciprocal(x: Interval) -> Interval:
    if x.lower <= 0:
        raise ZeroDivisionError("reciprocal of an interval containing 0")
    return Interval(1 / x.upper, 1 / x.lower)


def euler_product(k: int, tolerance: float = 1e-9) -> Interval:
    """Interval of width <= tolerance containing prod_{p >= k} (1 - k/p^2).

    With cutoff P the product splits as

        prod_{k<=p<P} (1 - k/p^2) * Z^k * G,   Z = 1 / (zeta(2) prod_{p<P} (1 - 1/p^2))

    where Z^k = prod_{p>=P} (1 - 1/p^2)^k is exact through zeta(2) = pi^2/6, and
    G = prod_{p>=P} (1 - k/p^2)/(1 - 1/p^2)^k lies in [exp(-k^2/(3(P-1)^3)), 1]
    whenever p^2 >= 2k, which holds for every p >= max(k, 2).

    Finite products are accumulated in fixed point with B fractional bits,
    rounding the lower bound down and the upper bound up at every factor.
    """
    P = euler_cutoff(k, tolerance)
    primes = _primes_tuple(P)
    bits = max(96, int(-math.log2(float(tolerance))) + 64)
    one = 1 << bits
    head_lo = head_hi = full_lo = full_hi = one
    for p in primes:
        p2 = p * p
        full_lo = full_lo * (p2 - 1) // p2
        full_hi = -(-full_hi * (p2 - 1) // p2)
        if p >= k:
            head_lo = head_lo * (p2 - k) // p2
            head_hi = -(-head_hi * (p2 - k) // p2)
    head = Interval(Fraction(head_lo, one), Fraction(head_hi, one))
    full = Interval(Fraction(full_lo, one), Fraction(full_hi, one))
    z = _reciprocal(_zeta2_interval(bits) * full)
    # round Z outward to B bits so Z^k keeps small denominators
    z = Interval(
        Fraction(math.floor(z.lower * one), one), Fraction(math.ceil(z.upper * one), one)
    )
    zk = Interval(z.lower**k, z.upper**k)
    # exp(-e) >= 1 - e
    eps = Fraction(k * k, 3 * (P - 1) ** 3)
    result = head * zk * Interval(1 - eps, 1)
    if result.width > Fraction(tolerance):
        raise ArithmeticError(
            f"euler_product({k}) enclosure width {float(result.width):.3g} "
            f"exceeds tolerance {tolerance}"
        )
    return result
