from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Iterable


class RationalPolynomial:
    """Polynomial in alpha with exact rational coefficients, lowest power first."""

    __slots__ = ("coefficients",)

    def __init__(self, coefficients: Iterable = ()):
        coeffs = [Fraction(c) for c in coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coefficients: tuple[Fraction, ...] = tuple(coeffs)

    @classmethod
    def binomial_power(cls, r: int, u: int) -> RationalPolynomial:
        """alpha^r (1 - alpha)^u expanded."""
        coeffs = [Fraction(0)] * (r + u + 1)
        for j in range(u + 1):
            coeffs[r + j] = Fraction((-1) ** j * comb(u, j))
        return cls(coeffs)

    @property
    def degree(self) -> int:
        """Degree of the trimmed polynomial; -1 for the zero polynomial."""
        return len(self.coefficients) - 1

    def __call__(self, alpha):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * alpha + c
        return acc

    def compose_reflect(self) -> RationalPolynomial:
        """The polynomial alpha -> self(1 - alpha)."""
        out = RationalPolynomial()
        for i, c in enumerate(self.coefficients):
            out = out + RationalPolynomial.binomial_power(0, i) * c
        return out

    def __add__(self, other):
        other = _coerce(other)
        n = max(len(self.coefficients), len(other.coefficients))
        a = self.coefficients + (Fraction(0),) * (n - len(self.coefficients))
        b = other.coefficients + (Fraction(0),) * (n - len(other.coefficients))
        return RationalPolynomial(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return RationalPolynomial(-c for c in self.coefficients)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        if not self.coefficients or not other.coefficients:
            return RationalPolynomial()
        out = [Fraction(0)] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            for j, b in enumerate(other.coefficients):
                out[i + j] += a * b
        return RationalPolynomial(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return self.coefficients == other.coefficients

    def __hash__(self):
        return hash(self.coefficients)

    def __repr__(self):
        return f"RationalPolynomial({[str(c) for c in self.coefficients]})"

    def __str__(self):
        if not self.coefficients:
            return "0"
        parts = []
        for power, c in enumerate(self.coefficients):
            if c == 0:
                continue
            mag = abs(c)
            if power == 0:
                term = str(mag)
            else:
                var = "α" if power == 1 else f"α^{power}"
                term = var if mag == 1 else f"{mag}·{var}"
            if not parts:
                parts.append(term if c > 0 else f"-{term}")
            else:
                parts.append(f"{'+' if c > 0 else '-'} {term}")
        return " ".join(parts)


def _coerce(value) -> RationalPolynomial:
    if isinstance(value, RationalPolynomial):
        return value
    if isinstance(value, (int, Fraction)):
        return RationalPolynomial([value])
    raise TypeError(f"cannot treat {type(value).__name__} as a polynomial")
