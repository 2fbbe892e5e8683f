"""Exact b_k polynomials and the visibility constants built from them.

c_k(alpha) = b_k(alpha) * prod_{p >= k} (1 - k/p^2) is the limiting proportion
of indices i at which P_i, ..., P_{i+k-1} are all visible; c_k(m; alpha)
replaces the infinite product by the finite one over k <= p < m.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .numtheory import Interval, euler_cutoff, euler_product, primes_below
from .polynomial import RationalPolynomial

__all__ = [
    "MAX_K",
    "ConstantReport",
    "b_poly",
    "c_level",
    "c_value",
    "coerce_alpha",
    "run_exact_limit",
    "visibility_change_limit",
]

MAX_K = 20


def coerce_alpha(alpha) -> Fraction:
    """Exact rational from a Fraction, int, float or 'p/q' / decimal string."""
    value = Fraction(alpha)
    if not 0 <= value <= 1:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    return value


def _obstruction_profiles(k: int) -> Counter:
    """Count step sequences by (right steps, |B_p(s)| for each prime p < k)."""
    primes = primes_below(k)
    n_seq = 1 << (k - 1)
    right = (np.arange(n_seq, dtype=np.int64)[:, None] >> np.arange(k - 1)) & 1
    xs = np.zeros((n_seq, k), dtype=np.int64)
    xs[:, 1:] = np.cumsum(right, axis=1)
    ys = np.arange(k) - xs
    columns = [xs[:, -1]]
    for p in primes:
        codes = np.sort(((-xs) % p) * p + (-ys) % p, axis=1)
        columns.append(1 + np.count_nonzero(np.diff(codes, axis=1), axis=1))
    keys, counts = np.unique(np.stack(columns, axis=1), axis=0, return_counts=True)
    return Counter(
        {(int(key[0]), tuple(int(v) for v in key[1:])): int(c) for key, c in zip(keys, counts)}
    )


@lru_cache(maxsize=None)
def _b_poly_cached(k: int) -> RationalPolynomial:
    primes = primes_below(k)
    weight_by_r: dict[int, Fraction] = {}
    for (r, sizes), count in _obstruction_profiles(k).items():
        w = Fraction(count)
        for p, size in zip(primes, sizes):
            w *= 1 - Fraction(size, p * p)
        weight_by_r[r] = weight_by_r.get(r, Fraction(0)) + w
    poly = RationalPolynomial()
    for r, w in sorted(weight_by_r.items()):
        poly = poly + RationalPolynomial.binomial_power(r, k - 1 - r) * w
    return poly


def b_poly(k: int, cap: int = MAX_K) -> RationalPolynomial:
    """b_k(alpha) = sum_s P(s) prod_{p<k} (1 - |B_p(s)|/p^2) as an exact polynomial.

    Enumerates all 2^(k-1) step sequences, so k is capped.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > cap:
        raise MemoryError(f"k = {k} exceeds the cap {cap} (2^(k-1) sequences)")
    return _b_poly_cached(k)


@dataclass(frozen=True)
class ConstantReport:
    k: int
    b_poly: RationalPolynomial
    alpha: Fraction
    euler_interval: Interval
    c_interval: Interval
    prime_cutoff_used: int

    @property
    def b_value(self) -> Fraction:
        return self.b_poly(self.alpha)


def c_value(k: int, alpha, tolerance: float = 1e-9) -> ConstantReport:
    """Enclosure of c_k(alpha) with width <= tolerance."""
    alpha = coerce_alpha(alpha)
    poly = b_poly(k)
    b = poly(alpha)
    euler_tol = tolerance / 2
    euler = euler_product(k, euler_tol)
    return ConstantReport(
        k=k,
        b_poly=poly,
        alpha=alpha,
        euler_interval=euler,
        c_interval=euler * b,
        prime_cutoff_used=euler_cutoff(k, euler_tol),
    )


def c_level(k: int, m: int, alpha) -> Fraction:
    """Exact c_k(m; alpha) = b_k(alpha) * prod_{k <= p < m} (1 - k/p^2)."""
    alpha = coerce_alpha(alpha)
    value = b_poly(k)(alpha)
    for p in primes_below(m):
        if p >= k:
            value *= 1 - Fraction(k, p * p)
    return value


def run_exact_limit(k: int, alpha, tolerance: float = 1e-9) -> Interval:
    """Enclosure of c_k - 2 c_{k+1} + c_{k+2}, the density of runs of exactly k."""
    t = tolerance / 4
    c0 = c_value(k, alpha, t).c_interval
    c1 = c_value(k + 1, alpha, t).c_interval
    c2 = c_value(k + 2, alpha, t).c_interval
    return c0 - 2 * c1 + c2


def visibility_change_limit(alpha=None, tolerance: float = 1e-9) -> Interval:
    """Enclosure of 12/pi^2 - 2 prod_p (1 - 2/p^2).

    The limit does not depend on alpha; a given alpha is only range-checked.
    """
    if alpha is not None:
        coerce_alpha(alpha)
    t = tolerance / 4
    return 2 * euler_product(1, t) - 2 * euler_product(2, t)
