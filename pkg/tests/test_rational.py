import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from latticewalk.numtheory import mobius, prime_factors
from latticewalk.rational import (
    PeriodicBinary,
    PeriodicBinaryError,
    column_density,
    limit_density,
    m_offsets,
    parse_periodic_binary,
    verify_empirically,
)

KNOWN_DENSITIES = {
    "0.(10)": Fraction(1, 2),
    "0.10000(10)": Fraction(7, 12),
    "0.11(101)": Fraction(13, 18),
    "0.1000(0110)": Fraction(2, 3),
    "0.10000(0110)": Fraction(5, 6),
    "0.1000(0111)": Fraction(817, 1320),
}

expansions = st.builds(
    PeriodicBinary,
    st.lists(st.integers(0, 1), max_size=8).map(tuple),
    st.lists(st.integers(0, 1), min_size=1, max_size=8).map(tuple).filter(lambda d: not all(d)),
)


def column_data(pb, i):
    x0, y0 = pb.start()
    sums = pb.partial_sums()
    r, t = sums[-1]
    ri, ti = sums[i - 1]
    return x0 + ri, y0 + ti, r, t


def density_by_counting(pb, i):
    """Visible fraction of one full period |m_i| of the column."""
    x, y, r, t = column_data(pb, i)
    m = t * x - r * y
    if m == 0:
        return Fraction(0)
    period = abs(m)
    hits = sum(math.gcd(x + j * r, y + j * t) == 1 for j in range(period))
    return Fraction(hits, period)


def density_by_divisor_sum(pb, i):
    """sum_{d | m_i} mu(d) S_i(d) / d, S_i(d) counted over residues mod d."""
    x, y, r, t = column_data(pb, i)
    m = abs(t * x - r * y)
    if m == 0:
        return Fraction(0)
    total = Fraction(0)
    for d in range(1, m + 1):
        if m % d:
            continue
        mu = mobius(d)
        if mu:
            s = sum((x + j * r) % d == 0 and (y + j * t) % d == 0 for j in range(d))
            total += Fraction(mu * s, d)
    return total


def test_parse_examples():
    assert parse_periodic_binary("0.1000(0110)") == PeriodicBinary((1, 0, 0, 0), (0, 1, 1, 0))
    assert parse_periodic_binary("0.(10)") == PeriodicBinary((), (1, 0))


@pytest.mark.parametrize("text", ["0.0(1)", "0.(111)", "1.0(0)", "0.12(0)", "0.1()", "0.10", ".1(0)", "0.1(0"])
def test_parse_rejects(text):
    with pytest.raises(PeriodicBinaryError):
        parse_periodic_binary(text)


def test_all_ones_message():
    with pytest.raises(PeriodicBinaryError, match="all ones"):
        parse_periodic_binary("0.0(1)")


def test_value_and_str_round_trip():
    pb = parse_periodic_binary("0.1000(0110)")
    assert str(pb) == "0.1000(0110)"
    assert pb.value() == Fraction(1, 2) + Fraction(6, 15) / 16
    assert parse_periodic_binary("0.(10)").value() == Fraction(2, 3)


@pytest.mark.parametrize("text, i, expected", [
    ("0.1000(0110)", 1, Fraction(2, 3)),
    ("0.1000(0110)", 2, Fraction(0)),
    ("0.(0)", 1, Fraction(0)),
])
def test_column_density_examples(text, i, expected):
    assert column_density(text, i) == expected


@pytest.mark.parametrize("text, expected", KNOWN_DENSITIES.items())
def test_limit_density_known_values(text, expected):
    assert limit_density(text).limit == expected


@pytest.mark.parametrize("text, expected", [
    ("0.1000(0110)", [6, 4, 2, 4]),
    ("0.10000(0110)", [8, 6, 4, 6]),
    ("0.1000(0111)", [11, 10, 9, 8]),
])
def test_m_offsets_known_values(text, expected):
    assert [abs(m) for m in m_offsets(text)] == expected


def test_report_structure():
    report = limit_density("0.1000(0110)")
    assert report.x0y0 == (1, 3)
    assert report.period_vector == (2, 2)
    assert report.column_offsets == [(0, 1), (1, 1), (2, 1), (2, 2)]
    assert report.m_values == [-6, -4, -2, -4]
    assert report.deltas == [Fraction(2, 3), 0, 1, 1]


@settings(max_examples=200, deadline=None)
@given(expansions)
def test_column_density_matches_oracles(pb):
    for i in range(1, pb.period_length + 1):
        x, y, r, t = column_data(pb, i)
        assume(abs(t * x - r * y) <= 10**4)
        delta = column_density(pb, i)
        assert delta == density_by_counting(pb, i)
        if t * x - r * y:
            assert delta == density_by_divisor_sum(pb, i)


@settings(max_examples=200, deadline=None)
@given(expansions)
def test_report_invariants(pb):
    report = limit_density(pb)
    r, t = report.period_vector
    assert r + t == pb.period_length
    assert all(0 <= d <= 1 for d in report.deltas)
    assert report.limit == sum(report.deltas) / pb.period_length
    assert 0 <= report.limit <= 1
    primes = set()
    for m in report.m_values:
        if m:
            primes |= set(prime_factors(abs(m)))
    assert (pb.period_length * math.prod(primes)) % report.limit.denominator == 0


def rotate(pb):
    head = pb.periodic[0]
    return PeriodicBinary(pb.aperiodic + (head,), pb.periodic[1:] + (head,))


@pytest.mark.parametrize("text", KNOWN_DENSITIES)
def test_rotation_invariance_known(text):
    pb = parse_periodic_binary(text)
    for _ in range(pb.period_length):
        pb = rotate(pb)
        assert limit_density(pb).limit == KNOWN_DENSITIES[text]


@settings(max_examples=100, deadline=None)
@given(expansions)
def test_rotation_invariance(pb):
    assert limit_density(rotate(pb)).limit == limit_density(pb).limit


def test_verify_empirically_examples():
    check = verify_empirically("0.(10)", 10**4)
    assert check.deviation < Fraction(1, 10**3)
    check = verify_empirically("0.1000(0111)", 10**6)
    assert check.deviation < Fraction(1, 100)
    assert check.within_bound
    check = verify_empirically("0.(0)", 100)
    assert check.empirical == Fraction(1, 100)
    assert check.limit == 0


def test_verify_empirically_trend():
    devs = [verify_empirically("0.1000(0111)", n).deviation for n in (10**3, 10**4, 10**5, 10**6)]
    assert devs[-1] == min(devs)


@settings(max_examples=50, deadline=None)
@given(expansions, st.integers(50, 3000))
def test_empirical_bound_holds(pb, n):
    assume(n >= pb.period_length)
    assert verify_empirically(pb, n).within_bound


def test_verify_empirically_needs_a_period():
    with pytest.raises(ValueError):
        verify_empirically("0.(0110)", 3)
