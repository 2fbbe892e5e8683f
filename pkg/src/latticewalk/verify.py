"""Self-check suites behind ``latticewalk verify``.

exact        closed-form polynomials, printed constants, rational densities
oracle       brute-force enumerations against the product formulas
statistical  Monte Carlo and deterministic walks against the limits
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .constants import b_poly, c_level, c_value, run_exact_limit, visibility_change_limit
from .lattice import count_admissible_classes, primorial_below, residue_obstructions, step_sequences
from .numtheory import primes_below
from .polynomial import RationalPolynomial
from .rational import limit_density, verify_empirically
from .simulator import WalkConfig, merge, simulate, simulate_stream

SUITES = ("exact", "oracle", "statistical")

KNOWN_DENSITIES = {
    "0.(10)": Fraction(1, 2),
    "0.10000(10)": Fraction(7, 12),
    "0.11(101)": Fraction(13, 18),
    "0.1000(0110)": Fraction(2, 3),
    "0.10000(0110)": Fraction(5, 6),
    "0.1000(0111)": Fraction(817, 1320),
}
KNOWN_M_ABS = {
    "0.1000(0110)": [6, 4, 2, 4],
    "0.10000(0110)": [8, 6, 4, 6],
    "0.1000(0111)": [11, 10, 9, 8],
}
KNOWN_CONSTANTS = {1: "0.6079", 2: "0.3226", 3: "0.1882", 4: "0.1041"}
RATIONAL_ALPHAS = [Fraction(i, 11) for i in range(1, 11)]


@dataclass
class CheckResult:
    name: str
    suite: str
    passed: bool
    measured: dict = field(default_factory=dict)
    seconds: float = 0.0


def _rounds_to(value: Fraction, printed: str) -> bool:
    return f"{float(value):.4f}" == printed


def check_polynomials():
    a = RationalPolynomial([0, 1])
    expected = {
        1: RationalPolynomial([1]),
        2: RationalPolynomial([1]),
        3: (1 - a + a * a) * Fraction(1, 2),
        4: (6 - 13 * a + 13 * a * a) * Fraction(1, 18),
    }
    got = {k: b_poly(k) for k in expected}
    return all(got[k] == expected[k] for k in expected), {f"b_{k}": str(p) for k, p in got.items()}


def check_printed_constants():
    measured = {}
    ok = True
    for k, printed in KNOWN_CONSTANTS.items():
        c = c_value(k, Fraction(1, 2), 5e-5).c_interval
        good = c.width <= Fraction(5, 10**5) and _rounds_to(c.lower, printed) and _rounds_to(c.upper, printed)
        ok &= good
        measured[f"c_{k}"] = [float(c.lower), float(c.upper)]
    return ok, measured


def check_rational_densities():
    measured = {}
    ok = True
    for text, limit in KNOWN_DENSITIES.items():
        report = limit_density(text)
        ok &= report.limit == limit
        measured[text] = str(report.limit)
    for text, ms in KNOWN_M_ABS.items():
        got = [abs(m) for m in limit_density(text).m_values]
        ok &= got == ms
        measured[f"|m| {text}"] = got
    return ok, measured


def check_degree_symmetry():
    ok = True
    measured = {}
    for k in range(1, 9):
        poly = b_poly(k)
        ok &= poly.degree == 2 * ((k - 1) // 2)
        ok &= poly.compose_reflect() == poly
        measured[f"deg b_{k}"] = poly.degree
    return ok, measured


def check_crt_counts():
    ok = True
    checked = 0
    for k in range(1, 6):
        for s in step_sequences(k):
            for m in (3, 4, 6):
                formula = 1
                for p in primes_below(m):
                    formula *= p * p - residue_obstructions(s, p)
                ok &= count_admissible_classes(s, m) == formula
                checked += 1
    return ok, {"cases": checked}


def check_average_identity():
    ok = True
    for k in range(1, 6):
        d2 = primorial_below(k) ** 2
        counts = [(s, count_admissible_classes(s, k)) for s in step_sequences(k)]
        for alpha in RATIONAL_ALPHAS:
            avg = sum(
                (alpha**s.right_count * (1 - alpha) ** s.up_count * c for s, c in counts),
                Fraction(0),
            ) / d2
            ok &= avg == b_poly(k)(alpha)
    return ok, {"k": "1..5", "alphas": len(RATIONAL_ALPHAS)}


def check_monte_carlo(steps=10**6, seeds=16, alphas=("0.3", "0.5", "0.7")):
    ok = True
    measured = {}
    for text in alphas:
        alpha = Fraction(text)
        runs = [simulate(WalkConfig(alpha, steps, k_max=4, seed=seed)) for seed in range(seeds)]
        refs = {}
        for k in range(1, 5):
            refs[f"consecutive_{k}"] = (c_value(k, alpha, 1e-8).c_interval.midpoint, lambda s, k=k: s.consecutive(k))
            refs[f"exact_run_{k}"] = (run_exact_limit(k, alpha, 1e-8).midpoint, lambda s, k=k: s.exact_runs(k))
        refs["change"] = (visibility_change_limit(alpha, 1e-8).midpoint, lambda s: s.change_count)
        for name, (ref, get) in refs.items():
            devs = [abs(float(Fraction(get(s), s.steps_counted) - ref)) for s in runs]
            med = statistics.median(devs)
            good = med < 0.005 and max(devs) < 0.02
            ok &= good
            measured[f"alpha={text} {name}"] = {"median_dev": med, "max_dev": max(devs)}
    return ok, measured


def check_level(steps=10**6):
    half = Fraction(1, 2)
    stats = simulate(WalkConfig(half, steps, k_max=3, level=4, seed=2024))
    ok = True
    measured = {}
    for k in range(1, 4):
        exact = c_level(k, 4, half)
        dev = abs(float(Fraction(stats.level_count(k), steps) - exact))
        ok &= dev < 0.01
        measured[f"k={k}"] = {"exact": str(exact), "deviation": dev}
    return ok, measured


def check_deterministic_walk(steps=10**6):
    check = verify_empirically("0.1000(0110)", steps)
    dev = float(check.deviation)
    return dev < 0.005, {"empirical": float(check.empirical), "deviation": dev}


def check_reproducibility():
    cfg = WalkConfig(Fraction(1, 2), 200_000, k_max=4, level=6, seed=9, streams=4)
    first, second = simulate(cfg), simulate(cfg)
    parts = [simulate_stream(cfg, j) for j in range(cfg.streams)]
    merged = parts[0]
    for part in parts[1:]:
        merged = merge(merged, part)
    return first == second == merged, {"steps": cfg.steps, "streams": cfg.streams}


CHECKS = {
    "exact": [
        ("b_k polynomials", check_polynomials),
        ("printed constants at alpha=1/2", check_printed_constants),
        ("rational walk densities", check_rational_densities),
        ("degree and symmetry of b_k", check_degree_symmetry),
    ],
    "oracle": [
        ("CRT class counts", check_crt_counts),
        ("average of |A_k(s)| equals b_k", check_average_identity),
    ],
    "statistical": [
        ("Monte Carlo convergence", check_monte_carlo),
        ("level-m convergence", check_level),
        ("periodic walk 0.1000(0110)", check_deterministic_walk),
        ("reproducibility", check_reproducibility),
    ],
}


def run_suite(suite: str = "all", budget: float | None = None) -> list[CheckResult]:
    """Run one suite (or all); checks not started within budget seconds fail."""
    names = SUITES if suite == "all" else (suite,)
    for name in names:
        if name not in CHECKS:
            raise ValueError(f"unknown suite {name!r}; choose from {SUITES + ('all',)}")
    start = time.perf_counter()
    results = []
    for name in names:
        for label, check in CHECKS[name]:
            elapsed = time.perf_counter() - start
            if budget is not None and elapsed >= budget:
                results.append(CheckResult(label, name, False, {"error": "time budget exhausted"}))
                continue
            t0 = time.perf_counter()
            passed, measured = check()
            results.append(CheckResult(label, name, bool(passed), measured, time.perf_counter() - t0))
    return results
