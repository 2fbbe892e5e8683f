"""Command line interface: ``latticewalk {constants,simulate,rational,verify}``.

Every command prints an envelope {command, parameters, results, metadata}
as canonical JSON (sorted keys, two-space indent) or as CSV with a header
row.  Rationals are written as "num/den" strings; decimals are strings
paired with a rigorous half-width.  Exit status: 0 success, 1 verification
failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from datetime import datetime, timezone
from fractions import Fraction

from . import __version__
from .constants import MAX_K, b_poly, c_level, c_value, coerce_alpha, run_exact_limit, visibility_change_limit
from .numtheory import Interval
from .rational import PeriodicBinaryError, limit_density, parse_periodic_binary, verify_empirically
from .simulator import GENERATOR_NAME, MAX_STEPS, WalkConfig, empirical_report, simulate
from .verify import run_suite

OUTPUT_DIR_ENV = "LATTICEWALK_OUTPUT_DIR"
MAX_LEVEL = 10**5


class UsageError(Exception):
    pass


def rational_str(value) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def decimal_with_error(interval: Interval, digits: int = 15) -> dict:
    """Decimal midpoint plus a half-width that covers the whole interval."""
    mid = Fraction(f"{float(interval.midpoint):.{digits}g}")
    half = max(interval.upper - mid, mid - interval.lower)
    # round the half-width up to 3 significant digits
    if half > 0:
        exp = math.floor(math.log10(half)) - 2
        scaled = math.ceil(half / Fraction(10) ** exp)
        half_text = f"{scaled // 100}.{scaled % 100:02d}e{exp + 2}"
    else:
        half_text = "0"
    return {"value": f"{float(mid):.{digits}g}", "halfwidth": half_text}


def _alpha(text: str) -> Fraction:
    try:
        return coerce_alpha(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"invalid alpha {text!r}: {exc}") from None


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {value}")
    return value


def _envelope(command, parameters, results, seed=None):
    return {
        "command": command,
        "parameters": parameters,
        "results": results,
        "metadata": {
            "generator": GENERATOR_NAME if command == "simulate" else None,
            "seed": seed,
            "version": __version__,
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        },
    }


def to_json(envelope) -> str:
    return json.dumps(envelope, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()


def cmd_constants(args):
    if args.k > MAX_K:
        raise UsageError(f"--k {args.k} exceeds the cap {MAX_K}")
    if args.level is not None and not 2 <= args.level <= MAX_LEVEL:
        raise UsageError(f"--level must lie in 2..{MAX_LEVEL}")
    if args.runs_exact and args.k + 2 > MAX_K:
        raise UsageError(f"--runs-exact needs c_{args.k + 2}, above the cap {MAX_K}")
    poly = b_poly(args.k)
    report = c_value(args.k, args.alpha, args.tolerance)
    results = {
        "k": args.k,
        "alpha": rational_str(args.alpha),
        "b_poly": {
            "coefficients": [rational_str(c) for c in poly.coefficients],
            "text": str(poly),
            "degree": poly.degree,
        },
        "b_value": rational_str(report.b_value),
        "c": decimal_with_error(report.c_interval),
        "euler_product": decimal_with_error(report.euler_interval),
        "prime_cutoff": report.prime_cutoff_used,
    }
    if args.level is not None:
        results["level"] = args.level
        results["c_level"] = rational_str(c_level(args.k, args.level, args.alpha))
    if args.runs_exact:
        results["run_exact"] = decimal_with_error(run_exact_limit(args.k, args.alpha, args.tolerance))
    if args.changes:
        results["change"] = decimal_with_error(visibility_change_limit(args.alpha, args.tolerance))
    params = {
        "k": args.k,
        "alpha": rational_str(args.alpha),
        "tolerance": repr(args.tolerance),
        "level": args.level,
        "runs_exact": args.runs_exact,
        "changes": args.changes,
    }
    row = {"k": args.k, "alpha": results["alpha"], "b_value": results["b_value"],
           "c_value": results["c"]["value"], "c_halfwidth": results["c"]["halfwidth"],
           "b_poly": " ".join(results["b_poly"]["coefficients"])}
    if "c_level" in results:
        row["c_level"] = results["c_level"]
    return _envelope("constants", params, results), [row], 0


def cmd_simulate(args):
    if args.steps > MAX_STEPS:
        raise UsageError(f"--steps {args.steps} exceeds the cap {MAX_STEPS}")
    if args.kmax > MAX_K:
        raise UsageError(f"--kmax {args.kmax} exceeds the cap {MAX_K}")
    if args.level is not None and not 2 <= args.level <= MAX_LEVEL:
        raise UsageError(f"--level must lie in 2..{MAX_LEVEL}")
    if not 0 <= args.seed < 1 << 64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    config = WalkConfig(args.alpha, args.steps, args.kmax, args.level, args.seed, args.streams)
    stats = simulate(config, workers=args.workers)
    top = min(args.kmax + 2, MAX_K)
    constants = [c_value(k, args.alpha, args.tolerance) for k in range(1, top + 1)]
    level_constants = None
    if args.level is not None:
        level_constants = {k: c_level(k, args.level, args.alpha) for k in range(1, args.kmax + 1)}
    rows = empirical_report(stats, constants, level_constants, args.flag_factor)
    table = []
    for row in rows:
        ref = row.reference
        table.append({
            "statistic": row.statistic,
            "k": row.k,
            "count": row.count,
            "proportion": rational_str(row.proportion),
            "proportion_decimal": f"{float(row.proportion):.10f}",
            "reference": rational_str(ref) if not isinstance(ref, Interval) else decimal_with_error(ref)["value"],
            "reference_halfwidth": "0" if not isinstance(ref, Interval) else decimal_with_error(ref)["halfwidth"],
            "deviation": f"{row.deviation:.3e}",
            "threshold": f"{row.threshold:.3e}",
            "flagged": row.flagged,
        })
    params = {
        "alpha": rational_str(args.alpha),
        "steps": args.steps,
        "kmax": args.kmax,
        "level": args.level,
        "seed": args.seed,
        "streams": args.streams,
        "tolerance": repr(args.tolerance),
        "flag_factor": repr(args.flag_factor),
    }
    results = {"stats": stats.as_dict(), "report": table}
    return _envelope("simulate", params, results, seed=args.seed), table, 0


def cmd_rational(args):
    try:
        pb = parse_periodic_binary(args.x)
    except PeriodicBinaryError as exc:
        raise UsageError(str(exc)) from None
    report = limit_density(pb)
    columns = [
        {
            "i": i,
            "r_i": off.x,
            "t_i": off.y,
            "m_i": m,
            "delta_i": rational_str(d),
        }
        for i, (off, m, d) in enumerate(zip(report.column_offsets, report.m_values, report.deltas), 1)
    ]
    results = {
        "x": str(pb),
        "value": rational_str(pb.value()),
        "x0y0": list(report.x0y0),
        "period_vector": list(report.period_vector),
        "columns": columns,
        "limit": rational_str(report.limit),
        "limit_decimal": f"{float(report.limit):.15g}",
    }
    if args.check_steps is not None:
        if args.check_steps > MAX_STEPS:
            raise UsageError(f"--check-steps exceeds the cap {MAX_STEPS}")
        if args.check_steps < pb.period_length:
            raise UsageError(f"--check-steps must be at least the period length {pb.period_length}")
        check = verify_empirically(pb, args.check_steps)
        results["check"] = {
            "steps": check.steps,
            "visible": check.visible,
            "empirical": rational_str(check.empirical),
            "deviation": rational_str(check.deviation),
            "bound": rational_str(check.bound),
            "within_bound": check.within_bound,
        }
    params = {"x": args.x, "check_steps": args.check_steps}
    return _envelope("rational", params, results), columns, 0


def cmd_verify(args):
    results = run_suite(args.suite, args.budget)
    table = [
        {
            "suite": r.suite,
            "check": r.name,
            "passed": r.passed,
            "seconds": f"{r.seconds:.2f}",
            "measured": json.dumps(r.measured, sort_keys=True),
        }
        for r in results
    ]
    payload = {
        "checks": [
            {"suite": r.suite, "check": r.name, "passed": r.passed, "measured": r.measured}
            for r in results
        ],
        "all_passed": all(r.passed for r in results),
    }
    params = {"suite": args.suite, "budget": args.budget}
    status = 0 if payload["all_passed"] else 1
    return _envelope("verify", params, payload), table, status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latticewalk",
        description="Visibility constants of random walks on the integer lattice.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--output", help=f"write here instead of stdout (relative to ${OUTPUT_DIR_ENV} if set)")

    p = sub.add_parser("constants", help="b_k polynomial and c_k(alpha) enclosure")
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--alpha", type=_alpha, default=Fraction(1, 2), help="'p/q' or decimal in [0,1]")
    p.add_argument("--tolerance", type=_positive_float, default=1e-9)
    p.add_argument("--level", type=int)
    p.add_argument("--runs-exact", action="store_true", help="also c_k - 2c_{k+1} + c_{k+2}")
    p.add_argument("--changes", action="store_true", help="also the change-of-visibility limit")
    common(p)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("simulate", help="seeded Monte Carlo walk statistics")
    p.add_argument("--alpha", type=_alpha, default=Fraction(1, 2))
    p.add_argument("--steps", type=_positive_int, default=10**6)
    p.add_argument("--kmax", type=_positive_int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--streams", type=_positive_int, default=1)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--level", type=int)
    p.add_argument("--tolerance", type=_positive_float, default=1e-9)
    p.add_argument("--flag-factor", type=_positive_float, default=1.0)
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("rational", help="exact density for an eventually periodic binary x")
    p.add_argument("--x", required=True, help="e.g. '0.1000(0110)'")
    p.add_argument("--check-steps", type=_positive_int)
    common(p)
    p.set_defaults(func=cmd_rational)

    p = sub.add_parser("verify", help="run the self-check suites")
    p.add_argument("--suite", choices=("exact", "oracle", "statistical", "all"), default="all")
    p.add_argument("--budget", type=_positive_float, default=None, help="seconds")
    common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def _write(text: str, output: str | None):
    if output is None:
        sys.stdout.write(text)
        return
    base = os.environ.get(OUTPUT_DIR_ENV)
    path = output if base is None or os.path.isabs(output) else os.path.join(base, output)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        envelope, rows, status = args.func(args)
    except (UsageError, MemoryError) as exc:
        parser.exit(2, f"{parser.prog} {args.command}: error: {exc}\n")
    text = to_json(envelope) if args.format == "json" else to_csv(rows)
    _write(text, args.output)
    return status


if __name__ == "__main__":
    sys.exit(main())
