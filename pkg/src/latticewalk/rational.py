"""Exact density of visible points on walks coded by eventually periodic
binary expansions (1 = step right, 0 = step up).

After the aperiodic prefix the walk sits at (x0, y0); the period adds the
partial sums (r_i, t_i), i = 1..l, with total (r, t).  Column i of the walk
is the arithmetic progression (x0 + r_i + j r, y0 + t_i + j t), j >= 0, and
every prime that divides both coordinates of one of its points divides

    m_i = t (x0 + r_i) - r (y0 + t_i).

The column density is delta_i = prod_{p | m_i} (1 - S_i(p)/p), where S_i(p)
counts residues j mod p putting the point on the lattice p Z^2.  The walk's
visible proportion tends to the mean of the delta_i.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .lattice import LatticePoint
from .numtheory import prime_factors
from .simulator import deterministic_walk

__all__ = [
    "DensityReport",
    "EmpiricalCheck",
    "PeriodicBinary",
    "PeriodicBinaryError",
    "column_density",
    "limit_density",
    "m_offsets",
    "parse_periodic_binary",
    "verify_empirically",
]

_SYNTAX = re.compile(r"0\.([01]*)\(([01]*)\)")


class PeriodicBinaryError(ValueError):
    pass


@dataclass(frozen=True)
class PeriodicBinary:
    aperiodic: tuple[int, ...]
    periodic: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "aperiodic", tuple(int(d) for d in self.aperiodic))
        object.__setattr__(self, "periodic", tuple(int(d) for d in self.periodic))
        if any(d not in (0, 1) for d in self.aperiodic + self.periodic):
            raise PeriodicBinaryError("binary digits must be 0 or 1")
        if not self.periodic:
            raise PeriodicBinaryError("the period must contain at least one digit")
        if all(self.periodic):
            raise PeriodicBinaryError(
                "a period of all ones is excluded: such an expansion ends in "
                "1111... and has a second representation ending in zeros"
            )

    def __str__(self):
        return "0." + "".join(map(str, self.aperiodic)) + "(" + "".join(map(str, self.periodic)) + ")"

    @property
    def period_length(self) -> int:
        return len(self.periodic)

    def digits(self, count: int) -> np.ndarray:
        """The first count binary digits as an int8 array."""
        head = np.array(self.aperiodic[:count], dtype=np.int8)
        rest = count - len(head)
        if rest <= 0:
            return head
        reps = -(-rest // len(self.periodic))
        tail = np.tile(np.array(self.periodic, dtype=np.int8), reps)[:rest]
        return np.concatenate([head, tail])

    def value(self) -> Fraction:
        """The rational number in [0, 1) this expansion represents."""
        m, l = len(self.aperiodic), len(self.periodic)
        a = int("".join(map(str, self.aperiodic)) or "0", 2)
        b = int("".join(map(str, self.periodic)), 2)
        return (Fraction(a) + Fraction(b, (1 << l) - 1)) / (1 << m)

    def start(self) -> LatticePoint:
        """(x0, y0): the position after the aperiodic digits."""
        r = sum(self.aperiodic)
        return LatticePoint(r, len(self.aperiodic) - r)

    def partial_sums(self) -> list[LatticePoint]:
        """(r_i, t_i) for i = 1..l."""
        out = []
        r = t = 0
        for d in self.periodic:
            r += d
            t += 1 - d
            out.append(LatticePoint(r, t))
        return out


def parse_periodic_binary(text: str) -> PeriodicBinary:
    """Parse '0.<digits>(<digits>)', e.g. '0.1000(0110)' or '0.(10)'."""
    match = _SYNTAX.fullmatch(text.strip())
    if match is None:
        raise PeriodicBinaryError(
            f"cannot parse {text!r}: expected 0.<binary digits>(<binary digits>), "
            "for example 0.1000(0110)"
        )
    aperiodic, periodic = match.groups()
    if not periodic:
        raise PeriodicBinaryError(f"cannot parse {text!r}: the period is empty")
    return PeriodicBinary(tuple(map(int, aperiodic)), tuple(map(int, periodic)))


def _coerce(pb) -> PeriodicBinary:
    return pb if isinstance(pb, PeriodicBinary) else parse_periodic_binary(pb)


def m_offsets(pb) -> list[int]:
    """Signed m_i = t (x0 + r_i) - r (y0 + t_i) for each column i = 1..l."""
    pb = _coerce(pb)
    x0, y0 = pb.start()
    sums = pb.partial_sums()
    r, t = sums[-1]
    return [t * (x0 + ri) - r * (y0 + ti) for ri, ti in sums]


def _column_density(x: int, y: int, m: int, r: int, t: int) -> Fraction:
    if m == 0:
        # every point past the first is a proper multiple of a lattice vector
        return Fraction(0)
    delta = Fraction(1)
    g = math.gcd(r, t)
    for p in prime_factors(abs(m)):
        if g % p:
            delta *= 1 - Fraction(1, p)
        elif x % p == 0 and y % p == 0:
            # p divides every point of the column
            return Fraction(0)
    return delta


def column_density(pb, i: int) -> Fraction:
    """delta_i for column i (1-based)."""
    pb = _coerce(pb)
    if not 1 <= i <= pb.period_length:
        raise IndexError(f"column {i} outside 1..{pb.period_length}")
    x0, y0 = pb.start()
    sums = pb.partial_sums()
    r, t = sums[-1]
    ri, ti = sums[i - 1]
    m = t * (x0 + ri) - r * (y0 + ti)
    return _column_density(x0 + ri, y0 + ti, m, r, t)


@dataclass(frozen=True)
class DensityReport:
    expansion: PeriodicBinary
    x0y0: LatticePoint
    period_vector: LatticePoint
    column_offsets: list[LatticePoint]
    m_values: list[int]
    deltas: list[Fraction]
    limit: Fraction


def limit_density(pb) -> DensityReport:
    pb = _coerce(pb)
    sums = pb.partial_sums()
    deltas = [column_density(pb, i) for i in range(1, pb.period_length + 1)]
    return DensityReport(
        expansion=pb,
        x0y0=pb.start(),
        period_vector=sums[-1],
        column_offsets=sums,
        m_values=m_offsets(pb),
        deltas=deltas,
        limit=sum(deltas, Fraction(0)) / pb.period_length,
    )


def _radical(n: int) -> int:
    return math.prod(prime_factors(n)) if n > 1 else 1


@dataclass(frozen=True)
class EmpiricalCheck:
    expansion: PeriodicBinary
    steps: int
    visible: int
    empirical: Fraction
    limit: Fraction
    deviation: Fraction
    bound: Fraction
    within_bound: bool


def verify_empirically(pb, n: int) -> EmpiricalCheck:
    """Walk n steps and compare the visible proportion with the exact limit.

    The column indicators are periodic with period rad(|m_i|), so the count
    over n points differs from n * limit by at most
    len(aperiodic) + l + sum_i rad(|m_i|); that over n is the reported bound.
    """
    pb = _coerce(pb)
    if n < pb.period_length:
        raise ValueError(f"n = {n} is shorter than the period {pb.period_length}")
    report = limit_density(pb)
    stats = deterministic_walk(pb.digits(n + 1), n, k_max=1)
    visible = stats.consecutive(1)
    empirical = Fraction(visible, n)
    deviation = abs(empirical - report.limit)
    slack = len(pb.aperiodic) + pb.period_length + sum(_radical(abs(m)) for m in report.m_values)
    bound = Fraction(slack, n)
    return EmpiricalCheck(
        expansion=pb,
        steps=n,
        visible=visible,
        empirical=empirical,
        limit=report.limit,
        deviation=deviation,
        bound=bound,
        within_bound=deviation <= bound,
    )
