import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latticewalk.numtheory import (
    Interval,
    euler_cutoff,
    euler_product,
    mobius,
    mobius_sieve,
    primes_below,
    totient,
    weighted_mobius_sum,
)


def trial_division_primes(limit):
    return [n for n in range(2, limit) if all(n % d for d in range(2, math.isqrt(n) + 1))]


def list_sieve(limit):
    flags = [True] * limit
    for n in range(2, math.isqrt(limit) + 1):
        if flags[n]:
            flags[n * n :: n] = [False] * len(range(n * n, limit, n))
    return [n for n in range(2, limit) if flags[n]]


def naive_euler_interval(k, tol):
    """Truncate at P >= k/tol + 1 and use 1 >= tail >= 1 - k/(P-1)."""
    P = math.ceil(k / tol) + 1
    value = 1.0
    for p in list_sieve(P):
        if p >= k:
            value *= 1 - k / p**2
    # float accumulation error over a few thousand factors is far below 1e-9
    slack = 1e-9
    lo = value * (1 - k / (P - 1)) - slack
    hi = value + slack
    return Interval(Fraction(lo), Fraction(hi))


@pytest.mark.parametrize("limit, expected", [
    (2, []),
    (10, [2, 3, 5, 7]),
    (30, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]),
])
def test_primes_below_examples(limit, expected):
    assert primes_below(limit) == expected


@pytest.mark.parametrize("limit", [0, 1, 3, 4, 97, 98, 1000])
def test_primes_below_matches_trial_division(limit):
    assert primes_below(limit) == trial_division_primes(limit)


def test_mobius_examples():
    assert mobius(1) == 1
    assert mobius(12) == 0
    assert mobius(30) == -1


def test_mobius_rejects_zero():
    with pytest.raises(ValueError):
        mobius(0)


def test_mobius_divisor_sum_identity():
    mu = mobius_sieve(10**4)
    sums = [0] * (10**4 + 1)
    for d in range(1, 10**4 + 1):
        for multiple in range(d, 10**4 + 1, d):
            sums[multiple] += int(mu[d])
    assert sums[1] == 1
    assert all(s == 0 for s in sums[2:])


def test_mobius_sieve_agrees_with_factorization():
    mu = mobius_sieve(2000)
    assert [int(v) for v in mu[1:]] == [mobius(n) for n in range(1, 2001)]


def test_weighted_mobius_sum_examples():
    assert weighted_mobius_sum(1) == 1
    assert weighted_mobius_sum(10) == Fraction(1307, 210)


def test_weighted_mobius_sum_near_6n_over_pi2():
    value = weighted_mobius_sum(1000)
    assert abs(float(value) - 6000 / math.pi**2) <= 8 * math.log(1000)


def test_weighted_mobius_sum_equals_totient_sum():
    phi_sum = Fraction(0)
    for n in range(1, 1001):
        phi_sum += Fraction(totient(n), n)
        if n <= 200 or n % 37 == 0 or n == 1000:
            assert weighted_mobius_sum(n) == phi_sum, n


def test_results_are_canonical():
    for n in (7, 64, 365):
        v = weighted_mobius_sum(n)
        assert v.denominator > 0 and math.gcd(v.numerator, v.denominator) == 1


@pytest.mark.parametrize("k, tol, inside", [
    (1, 1e-6, 6 / math.pi**2),
    (2, 1e-4, 0.3226),
    (3, 1e-4, 0.1882 / (3 / 8)),
])
def test_euler_product_examples(k, tol, inside):
    enc = euler_product(k, tol)
    assert enc.width <= Fraction(tol)
    # the printed figures carry 4 decimals
    assert abs(float(enc.midpoint) - inside) < 1e-4


def test_euler_product_k1_contains_6_over_pi2():
    enc = euler_product(1, 1e-12)
    lo, hi = float(enc.lower), float(enc.upper)
    assert lo <= 6 / math.pi**2 <= hi


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 7, 11])
def test_euler_product_agrees_with_naive_truncation(k):
    naive = naive_euler_interval(k, 1e-4)
    fast = euler_product(k, 1e-9)
    assert naive.contains(fast)


@settings(max_examples=30, deadline=None)
@given(k=st.integers(1, 20), exp=st.integers(3, 14))
def test_euler_product_width_and_consistency(k, exp):
    loose = euler_product(k, 10.0 ** -exp)
    tight = euler_product(k, 10.0 ** -(exp + 1))
    assert loose.width <= Fraction(10.0 ** -exp)
    assert tight.width <= Fraction(10.0 ** -(exp + 1))
    assert loose.overlaps(tight)


def test_euler_cutoff_grows_with_precision():
    assert euler_cutoff(3, 1e-4) <= euler_cutoff(3, 1e-12)
    assert euler_cutoff(20, 1e-9) > 20


def test_interval_arithmetic_is_exact():
    a = Interval(Fraction(1, 3), Fraction(1, 2))
    b = Interval(Fraction(-1, 4), Fraction(1, 5))
    prod = a * b
    assert prod == Interval(Fraction(-1, 8), Fraction(1, 10))
    assert (a - a).contains(0)
    assert (2 * a).width == 2 * a.width
    with pytest.raises(ValueError):
        Interval(1, 0)
