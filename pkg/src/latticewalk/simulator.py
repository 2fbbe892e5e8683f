"""Seeded alpha-random walks and streaming visibility statistics.

Walk P_0 = (0,0), P_{i+1} = P_i + (1,0) with probability alpha, else (0,1).
With X_i = 1 iff P_i is visible (X_0 = 0, the origin is not), the counters
for i = 1..n are

    consecutive_visible[k]  sum X_i ... X_{i+k-1}
    exact_run_counts[k]     sum (1 - X_{i-1}) X_i ... X_{i+k-1} (1 - X_{i+k})
    change_count            sum (X_{i-1} - X_i)^2
    level_consecutive[k]    as consecutive_visible, with visibility at level m

so a walk of n counted steps needs positions up to P_{n + k_max}.

Random steps: stream j of a run uses numpy's PCG64 seeded with
SeedSequence(seed, spawn_key=(j,)); each raw 64-bit word w gives a right
step iff w < floor(alpha * 2^64).  A run with several streams is a set of
independent walks, each from the origin, whose step counts split n as
evenly as possible (earlier streams take the remainder); their statistics
are merged by summation.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .constants import ConstantReport, coerce_alpha
from .numtheory import Interval, primes_below

__all__ = [
    "GENERATOR_NAME",
    "MAX_STEPS",
    "WalkConfig",
    "WalkStats",
    "deterministic_walk",
    "empirical_report",
    "merge",
    "simulate",
    "simulate_stream",
    "stream_steps",
]

GENERATOR_NAME = "numpy.PCG64 via SeedSequence(seed, spawn_key=(stream,)); right iff word < floor(alpha*2^64)"
MAX_STEPS = 10**10
CHUNK = 1 << 20
_TWO64 = 1 << 64


@dataclass(frozen=True)
class WalkConfig:
    alpha: Fraction
    steps: int
    k_max: int = 1
    level: int | None = None
    seed: int = 0
    streams: int = 1

    def __post_init__(self):
        object.__setattr__(self, "alpha", coerce_alpha(self.alpha))
        if self.steps < 0:
            raise ValueError(f"steps must be >= 0, got {self.steps}")
        if self.steps > MAX_STEPS:
            raise MemoryError(f"steps {self.steps} exceed the cap {MAX_STEPS}")
        if self.k_max < 1:
            raise ValueError(f"k_max must be >= 1, got {self.k_max}")
        if self.level is not None and self.level < 2:
            raise ValueError(f"level must be >= 2, got {self.level}")
        if self.streams < 1:
            raise ValueError(f"streams must be >= 1, got {self.streams}")
        if not 0 <= self.seed < _TWO64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def threshold(self) -> int:
        """floor(alpha * 2^64): a raw word below it is a right step."""
        return math.floor(self.alpha * _TWO64)

    def stream_steps(self, stream: int) -> int:
        base, extra = divmod(self.steps, self.streams)
        return base + (1 if stream < extra else 0)


def stream_steps(config: WalkConfig, stream: int) -> int:
    return config.stream_steps(stream)


@dataclass(frozen=True)
class WalkStats:
    k_max: int
    level: int | None = None
    steps_counted: int = 0
    consecutive_visible: tuple[int, ...] = ()
    exact_run_counts: tuple[int, ...] = ()
    change_count: int = 0
    level_consecutive: tuple[int, ...] | None = None

    def __post_init__(self):
        zeros = (0,) * self.k_max
        if not self.consecutive_visible:
            object.__setattr__(self, "consecutive_visible", zeros)
        if not self.exact_run_counts:
            object.__setattr__(self, "exact_run_counts", zeros)
        if self.level is not None and self.level_consecutive is None:
            object.__setattr__(self, "level_consecutive", zeros)

    @classmethod
    def empty(cls, k_max: int, level: int | None = None) -> WalkStats:
        return cls(k_max=k_max, level=level)

    def consecutive(self, k: int) -> int:
        return self.consecutive_visible[k - 1]

    def exact_runs(self, k: int) -> int:
        return self.exact_run_counts[k - 1]

    def level_count(self, k: int) -> int:
        if self.level_consecutive is None:
            raise ValueError("these statistics were collected without a level")
        return self.level_consecutive[k - 1]

    def proportion(self, count: int) -> Fraction:
        return Fraction(count, self.steps_counted)

    def as_dict(self) -> dict:
        out = {
            "k_max": self.k_max,
            "level": self.level,
            "steps_counted": self.steps_counted,
            "consecutive_visible": list(self.consecutive_visible),
            "exact_run_counts": list(self.exact_run_counts),
            "change_count": self.change_count,
        }
        if self.level_consecutive is not None:
            out["level_consecutive"] = list(self.level_consecutive)
        return out


def merge(a: WalkStats, b: WalkStats) -> WalkStats:
    if a.k_max != b.k_max or a.level != b.level:
        raise ValueError(
            f"cannot merge stats with (k_max, level) = {(a.k_max, a.level)} "
            f"and {(b.k_max, b.level)}"
        )

    def add(x, y):
        return tuple(i + j for i, j in zip(x, y))

    return WalkStats(
        k_max=a.k_max,
        level=a.level,
        steps_counted=a.steps_counted + b.steps_counted,
        consecutive_visible=add(a.consecutive_visible, b.consecutive_visible),
        exact_run_counts=add(a.exact_run_counts, b.exact_run_counts),
        change_count=a.change_count + b.change_count,
        level_consecutive=(
            None
            if a.level_consecutive is None
            else add(a.level_consecutive, b.level_consecutive)
        ),
    )


class _Accumulator:
    """Consumes visibility flags X_1, X_2, ... in chunks and counts windows."""

    def __init__(self, n: int, k_max: int, level: int | None):
        self.n = n
        self.k_max = k_max
        self.level = level
        self.cv = [0] * k_max
        self.runs = [0] * k_max
        self.lv = [0] * k_max
        self.changes = 0
        # buffers start at X_0 = 0
        self.vis = np.zeros(1, dtype=bool)
        self.lvis = np.zeros(1, dtype=bool)
        self.base = 0
        self.next_i = 1

    @property
    def done(self) -> bool:
        return self.next_i > self.n

    def feed(self, vis: np.ndarray, lvis: np.ndarray | None):
        buf = np.concatenate([self.vis, vis])
        lbuf = np.concatenate([self.lvis, lvis]) if self.level is not None else None
        last = min(self.n, self.base + len(buf) - 1 - self.k_max)
        if last >= self.next_i:
            lo = self.next_i - self.base
            self._count(buf, lbuf, lo, last - self.next_i + 1)
            self.next_i = last + 1
        keep = self.next_i - 1 - self.base
        self.vis = buf[keep:]
        if lbuf is not None:
            self.lvis = lbuf[keep:]
        self.base += keep

    def _count(self, buf, lbuf, lo, cnt):
        prev = buf[lo - 1 : lo - 1 + cnt]
        cur = buf[lo : lo + cnt]
        self.changes += int(np.count_nonzero(prev ^ cur))
        not_prev = ~prev
        prod = cur.copy()
        for k in range(1, self.k_max + 1):
            nxt = buf[lo + k : lo + k + cnt]
            self.cv[k - 1] += int(np.count_nonzero(prod))
            self.runs[k - 1] += int(np.count_nonzero(prod & not_prev & ~nxt))
            prod &= nxt
        if lbuf is not None:
            prod = lbuf[lo : lo + cnt].copy()
            for k in range(1, self.k_max + 1):
                self.lv[k - 1] += int(np.count_nonzero(prod))
                prod &= lbuf[lo + k : lo + k + cnt]

    def stats(self) -> WalkStats:
        return WalkStats(
            k_max=self.k_max,
            level=self.level,
            steps_counted=self.n,
            consecutive_visible=tuple(self.cv),
            exact_run_counts=tuple(self.runs),
            change_count=self.changes,
            level_consecutive=tuple(self.lv) if self.level is not None else None,
        )


def _walk(step_chunks: Iterable[np.ndarray], n: int, k_max: int, level: int | None) -> WalkStats:
    """Statistics of the walk whose right-steps are given chunk by chunk."""
    acc = _Accumulator(n, k_max, level)
    if n == 0:
        return acc.stats()
    primes = np.array(primes_below(level), dtype=np.int64) if level else None
    x0 = y0 = 0
    for right in step_chunks:
        right = np.asarray(right, dtype=bool)
        xs = x0 + np.cumsum(right, dtype=np.int64)
        ys = y0 + np.cumsum(~right, dtype=np.int64)
        x0, y0 = int(xs[-1]), int(ys[-1])
        vis = np.gcd(xs, ys) == 1
        lvis = None
        if primes is not None:
            lvis = np.ones(len(xs), dtype=bool)
            for p in primes:
                lvis &= (xs % p != 0) | (ys % p != 0)
        acc.feed(vis, lvis)
        if acc.done:
            break
    if not acc.done:
        raise ValueError(f"step source exhausted before position {n + k_max}")
    return acc.stats()


def _random_chunks(config: WalkConfig, stream: int, total: int):
    bitgen = np.random.PCG64(np.random.SeedSequence(config.seed, spawn_key=(stream,)))
    threshold = config.threshold
    while total > 0:
        size = min(CHUNK, total)
        words = bitgen.random_raw(size)
        if threshold >= _TWO64:
            yield np.ones(size, dtype=bool)
        else:
            yield words < np.uint64(threshold)
        total -= size


def simulate_stream(config: WalkConfig, stream: int) -> WalkStats:
    """Statistics of the walk owned by one stream of the configuration."""
    if not 0 <= stream < config.streams:
        raise ValueError(f"stream {stream} outside 0..{config.streams - 1}")
    n = config.stream_steps(stream)
    chunks = _random_chunks(config, stream, n + config.k_max)
    return _walk(chunks, n, config.k_max, config.level)


def simulate(config: WalkConfig, workers: int = 1) -> WalkStats:
    """Merged statistics of all streams; bit-identical for any worker count."""
    streams = range(config.streams)
    if workers > 1 and config.streams > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(simulate_stream, itertools.repeat(config), streams))
    else:
        parts = [simulate_stream(config, j) for j in streams]
    total = WalkStats.empty(config.k_max, config.level)
    for part in parts:
        total = merge(total, part)
    return total


def _digit_chunks(digits):
    if isinstance(digits, np.ndarray):
        for start in range(0, len(digits), CHUNK):
            yield digits[start : start + CHUNK] != 0
        return
    it = iter(digits)
    while True:
        block = list(itertools.islice(it, CHUNK))
        if not block:
            return
        yield np.array(block, dtype=np.int64) != 0


def deterministic_walk(digits, n: int, k_max: int = 1, level: int | None = None) -> WalkStats:
    """Statistics of the walk driven by binary digits (1 = right, 0 = up).

    The digit source must supply at least n + k_max digits.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return _walk(_digit_chunks(digits), n, k_max, level)


@dataclass
class ReportRow:
    statistic: str
    k: int | None
    count: int
    proportion: Fraction
    reference: Fraction | Interval
    deviation: float
    threshold: float
    flagged: bool = field(default=False)


def _deviation(value: Fraction, reference) -> float:
    if isinstance(reference, Interval):
        if reference.contains(value):
            return 0.0
        return float(min(abs(value - reference.lower), abs(value - reference.upper)))
    return float(abs(value - Fraction(reference)))


def empirical_report(
    stats: WalkStats,
    constants: list[ConstantReport],
    level_constants: dict[int, Fraction] | None = None,
    flag_factor: float = 1.0,
) -> list[ReportRow]:
    """Compare empirical proportions with their limits.

    A row is flagged when its deviation exceeds flag_factor * n^(-1/4).
    Run-of-exactly-k rows appear when c_{k+1} and c_{k+2} are also supplied;
    the change row needs c_1 and c_2.
    """
    n = stats.steps_counted
    if n == 0:
        return []
    threshold = flag_factor * n ** -0.25
    by_k = {c.k: c.c_interval for c in constants}
    rows: list[ReportRow] = []

    def add(name, k, count, reference):
        prop = Fraction(count, n)
        dev = _deviation(prop, reference)
        rows.append(ReportRow(name, k, count, prop, reference, dev, threshold, dev > threshold))

    for k in range(1, stats.k_max + 1):
        if k in by_k:
            add("consecutive", k, stats.consecutive(k), by_k[k])
    for k in range(1, stats.k_max + 1):
        if all(j in by_k for j in (k, k + 1, k + 2)):
            add("exact_run", k, stats.exact_runs(k), by_k[k] - 2 * by_k[k + 1] + by_k[k + 2])
    if 1 in by_k and 2 in by_k:
        add("change", None, stats.change_count, 2 * by_k[1] - 2 * by_k[2])
    if stats.level is not None and level_constants:
        for k in range(1, stats.k_max + 1):
            if k in level_constants:
                add("level", k, stats.level_count(k), level_constants[k])
    return rows
