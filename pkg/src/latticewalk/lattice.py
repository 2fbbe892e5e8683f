"""Visibility predicates, step sequences and the residue classes that
obstruct or admit visibility of a translated step sequence."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .numtheory import is_prime, primes_below

__all__ = [
    "MAX_ENUMERATION_MODULUS",
    "LatticePoint",
    "ResidueClassSet",
    "StepSequence",
    "admissible_classes",
    "count_admissible_classes",
    "is_p_visible",
    "is_visible",
    "is_visible_at_level",
    "obstruction_classes",
    "primorial_below",
    "residue_obstructions",
    "step_sequences",
]

MAX_ENUMERATION_MODULUS = 2310


class LatticePoint(NamedTuple):
    x: int
    y: int


RIGHT = LatticePoint(1, 0)
UP = LatticePoint(0, 1)


@dataclass(frozen=True)
class StepSequence:
    """k cumulative offsets s_0 = (0,0), s_1, ..., s_{k-1} of unit steps."""

    offsets: tuple[LatticePoint, ...]
    right_count: int = field(init=False)
    up_count: int = field(init=False)

    def __post_init__(self):
        offsets = tuple(LatticePoint(*o) for o in self.offsets)
        if not offsets or offsets[0] != (0, 0):
            raise ValueError("a step sequence starts at (0, 0)")
        for a, b in zip(offsets, offsets[1:]):
            if (b.x - a.x, b.y - a.y) not in (RIGHT, UP):
                raise ValueError(f"{a} -> {b} is not a unit step right or up")
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "right_count", offsets[-1].x)
        object.__setattr__(self, "up_count", offsets[-1].y)

    @classmethod
    def from_steps(cls, steps: Iterable) -> StepSequence:
        """Build from steps given as 'R'/'U' characters or truthy = right."""
        x = y = 0
        offsets = [LatticePoint(0, 0)]
        for step in steps:
            right = step.upper() == "R" if isinstance(step, str) else bool(step)
            if right:
                x += 1
            else:
                y += 1
            offsets.append(LatticePoint(x, y))
        return cls(tuple(offsets))

    def __len__(self):
        return len(self.offsets)

    def complement(self) -> StepSequence:
        """Same walk with right and up steps exchanged."""
        return StepSequence(tuple(LatticePoint(o.y, o.x) for o in self.offsets))


def step_sequences(k: int):
    """All 2^(k-1) step sequences with k points, in lexicographic step order."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    for steps in itertools.product((True, False), repeat=k - 1):
        yield StepSequence.from_steps(steps)


def _as_sequence(s) -> StepSequence:
    return s if isinstance(s, StepSequence) else StepSequence(tuple(s))


@dataclass(frozen=True)
class ResidueClassSet:
    modulus: int
    classes: frozenset

    def __len__(self):
        return len(self.classes)

    def __contains__(self, point):
        x, y = point
        return (x % self.modulus, y % self.modulus) in self.classes


def is_visible(point) -> bool:
    x, y = point
    return math.gcd(x, y) == 1


def _require_prime(p: int):
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")


def is_p_visible(point, p: int) -> bool:
    _require_prime(p)
    x, y = point
    return not (x % p == 0 and y % p == 0)


def is_visible_at_level(point, m: int) -> bool:
    """p-visible for every prime p < m; vacuously true for m < 3."""
    x, y = point
    return all(x % p or y % p for p in primes_below(m))


def obstruction_classes(s, p: int) -> ResidueClassSet:
    """Classes (x, y) mod p congruent to -s_i for some i."""
    _require_prime(p)
    s = _as_sequence(s)
    return ResidueClassSet(p, frozenset(((-o.x) % p, (-o.y) % p) for o in s.offsets))


def residue_obstructions(s, p: int) -> int:
    return len(obstruction_classes(s, p))


def primorial_below(m: int) -> int:
    return math.prod(primes_below(m))


def _admissible_mask(s: StepSequence, m: int) -> np.ndarray:
    modulus = primorial_below(m)
    if modulus > MAX_ENUMERATION_MODULUS:
        raise MemoryError(
            f"enumerating classes mod {modulus} exceeds the cap "
            f"{MAX_ENUMERATION_MODULUS} (m <= 12)"
        )
    grid = np.arange(modulus)
    xs, ys = np.meshgrid(grid, grid, indexing="ij")
    mask = np.ones((modulus, modulus), dtype=bool)
    for p in primes_below(m):
        xr, yr = xs % p, ys % p
        for bx, by in obstruction_classes(s, p).classes:
            mask &= ~((xr == bx) & (yr == by))
    return mask


def count_admissible_classes(s, m: int) -> int:
    """|A_m(s)| by direct enumeration of all classes mod prod_{p<m} p.

    Brute force by design; the CRT product formula is checked against it.
    """
    return int(np.count_nonzero(_admissible_mask(_as_sequence(s), m)))


def admissible_classes(s, m: int) -> ResidueClassSet:
    mask = _admissible_mask(_as_sequence(s), m)
    xs, ys = np.nonzero(mask)
    return ResidueClassSet(
        primorial_below(m), frozenset(zip(xs.tolist(), ys.tolist()))
    )
