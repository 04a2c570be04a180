"""Command-line front end.

Examples::

    evenpow verify 11
    evenpow scan-exact --max-n 10000
    evenpow sieve --start 0 --end 1000000000 --checkpoint cp.txt --hits hits.tsv
    evenpow measure --d-max 10
    evenpow summability --d-max 10
    evenpow heuristic --mode exact
    evenpow orbit --x0 0 --k-max 20 --d-cap 8
    evenpow orbit --x0 0 --k-max 100000 --d-cap 10 --samples 1000 --seed 1

Exit status is 0 on success, 2 for usage or configuration errors and 1 for
runtime failures (I/O, bad checkpoints).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import exact, measure, orbit, sieve
from .errors import CheckpointError, ConfigError

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def nonneg_int(text: str) -> int:
    """Accepts plain integers and also forms like ``10**9`` or ``1e9``."""
    s = text.strip().replace("_", "")
    try:
        if "**" in s:
            base, exp = s.split("**")
            value = int(base) ** int(exp)
        elif "^" in s:
            base, exp = s.split("^")
            value = int(base) ** int(exp)
        elif "e" in s.lower():
            mant, exp = s.lower().split("e")
            value = int(mant) * 10 ** int(exp)
        else:
            value = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a nonnegative integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative: {text!r}")
    return value


def positive_int(text: str) -> int:
    value = nonneg_int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1: {text!r}")
    return value


def _show_power(n: int, x: exact.BigDecimalNat) -> str:
    s = str(x)
    if len(s) <= 60:
        return s
    return f"{s[:24]}...{s[-24:]}({len(s)}digits)"


def cmd_verify(args) -> int:
    status = exact.verify_even_power(args.n)
    x = exact.pow2_exact(args.n)
    flag = "true" if status is exact.Status.CONFIRMED else "false"
    print(f"n={args.n} 2^n={_show_power(args.n, x)} all_even={flag}")
    return EXIT_OK


def cmd_scan_exact(args) -> int:
    result = exact.scan_exact(args.max_n)
    print(f"max_n={result.n_max}")
    print("even_digit_n=" + " ".join(map(str, result.even_n)))
    print("digits_le4_p=" + " ".join(map(str, result.le4_p)))
    return EXIT_OK


def cmd_sieve(args) -> int:
    cfg = sieve.ScanConfig(
        p_start=args.start,
        p_end=args.end,
        digits=args.digits,
        workers=args.threads,
        partition=args.partition,
        checkpoint_path=args.checkpoint,
        checkpoint_interval=args.checkpoint_interval,
        verify_limit=args.verify_limit,
        hits_path=args.hits,
    )
    report = sieve.scan_range(cfg)
    sys.stdout.write(sieve.format_scan_report(report, cfg))
    return EXIT_OK


def cmd_measure(args) -> int:
    if args.d is not None:
        depths = [args.d]
    else:
        depths = range(1, args.d_max + 1)
    sys.stdout.write(measure.format_measure_table(measure.measure_B_d(d) for d in depths))
    return EXIT_OK


def cmd_summability(args) -> int:
    r = measure.summability(args.d_max)
    print("d\texact_measure")
    for d, m in enumerate(r.per_d_measures, 1):
        print(f"{d}\t{m:.12f}")
    print(f"multiplicity_bound={r.multiplicity_bound}")
    print(f"partial_sum={r.partial_sum:.12f}")
    print(f"tail_bound={r.tail_bound:.12f}")
    print(f"total_bound={r.total_bound:.12f}")
    return EXIT_OK


_MODES = {"paper": "paper_geometric", "exact": "exact_dk"}


def cmd_heuristic(args) -> int:
    value = measure.heuristic_expected_count(_MODES[args.mode])
    print(f"mode={args.mode} expected_count={value:.6f}")
    return EXIT_OK


def cmd_orbit(args) -> int:
    cfg = orbit.OrbitConfig(
        x0=args.x0,
        k_max=args.k_max,
        d_cap=args.d_cap,
        sample_count=args.samples or 1,
        rng_seed=args.seed,
    )
    if args.samples:
        report = orbit.ensemble_stats(cfg, workers=os.cpu_count() or 1)
        sys.stdout.write(orbit.format_ensemble_report(report))
    else:
        sys.stdout.write(orbit.format_orbit_report(orbit.orbit_hits(cfg)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evenpow",
        description="Search and analysis tools for powers of two with all even digits.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("sieve", help="scan exponents with the trailing-digit sieve")
    p.add_argument("--start", type=nonneg_int, required=True, help="first exponent p")
    p.add_argument("--end", type=nonneg_int, required=True, help="last exponent p (inclusive)")
    p.add_argument("--digits", type=positive_int, default=54, help="trailing digits D (default 54)")
    p.add_argument("--threads", type=positive_int, default=os.cpu_count() or 1)
    p.add_argument("--partition", choices=sieve.PARTITIONS, default="blocks")
    p.add_argument("--checkpoint", type=Path)
    p.add_argument("--checkpoint-interval", type=positive_int, default=10**8)
    p.add_argument("--hits", type=Path, help="tab-separated hit log")
    p.add_argument("--verify-limit", type=nonneg_int, default=exact.EXACT_LIMIT)
    p.set_defaults(func=cmd_sieve)

    p = sub.add_parser("verify", help="check whether 2^n has only even digits")
    p.add_argument("n", type=positive_int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan-exact", help="brute-force exact scan of small exponents")
    p.add_argument("--max-n", type=positive_int, required=True)
    p.set_defaults(func=cmd_scan_exact)

    p = sub.add_parser("measure", help="measure of B_d")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--d", type=positive_int)
    g.add_argument("--d-max", type=positive_int)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("summability", help="bound on the sum of target measures")
    p.add_argument("--d-max", type=positive_int, required=True)
    p.set_defaults(func=cmd_summability)

    p = sub.add_parser("heuristic", help="random-digit estimate of the solution count")
    p.add_argument("--mode", choices=sorted(_MODES), default="paper")
    p.set_defaults(func=cmd_heuristic)

    p = sub.add_parser("orbit", help="rotation orbit hits against B_d(k)")
    p.add_argument("--x0", required=True, help="starting phase in [0, 1), decimal")
    p.add_argument("--k-max", type=positive_int, required=True)
    p.add_argument("--d-cap", type=positive_int, required=True)
    p.add_argument("--samples", type=positive_int, help="run an ensemble of random phases")
    p.add_argument("--seed", type=nonneg_int, default=0)
    p.set_defaults(func=cmd_orbit)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(name)s %(message)s",
    )
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"evenpow {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (CheckpointError, OSError, ArithmeticError) as e:
        print(f"evenpow {args.command}: {e}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(run())
