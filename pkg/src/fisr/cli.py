"""Command-line interface: derive, eval, sweep, verify, bench.

Exit codes: 0 success, 1 usage or domain error, 2 solver failure,
3 verification failure.  Machine-readable output goes to stdout; progress
and file notes go to stderr so csv/json-lines stay clean.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import struct
import sys
import time
from pathlib import Path
from typing import Dict, List, NoReturn, Optional, Sequence

from .derive import BracketError, derive_all, verify_rel_k2_matches_k1
from .floatbits import DomainError, as_single, bits_to_float, float_to_bits
from .kernel import CLASSIC_MAGIC, KernelConfig, invsqrt
from . import figures
from . import sweep as sweep_mod

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SOLVER = 2
EXIT_VERIFY = 3

GAP_BOUND = 6.0e-8
# Sweep maxima may exceed the continuous-model prediction by rounding of the
# seed constant itself, never by more than one mantissa step scaled into the
# error; the window below reflects that.
WINDOW_BELOW = 2.0 ** -22
WINDOW_ABOVE = 8.0 * 2.0 ** -23

_INJECT_ENV = "FISR_INJECT_MAGIC"


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on usage errors; we reserve 2 for
    solver failures, so route usage problems to exit code 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _magic_arg(text: str) -> int:
    try:
        value = int(text, 16) if text.lower().startswith("0x") else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= value <= 0xFFFFFFFF:
        raise argparse.ArgumentTypeError(f"not a 32-bit constant: {text}")
    return value


def _parse_x(text: str) -> float:
    """Accept a decimal literal or a 0x bit pattern; positive normals only."""
    if text.lower().startswith("0x"):
        return bits_to_float(int(text, 16))
    try:
        value = float(text)
    except ValueError:
        raise DomainError(f"not a number: {text!r}")
    single = as_single(value)
    float_to_bits(single)  # rejects zero, subnormal, inf, nan, negative
    return single


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fisr",
                     description="Fast inverse square root: kernel, seed "
                                 "model, derived constants, verification.")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    fmt = dict(choices=("table", "csv", "json-lines"), default="table")

    p = sub.add_parser("derive", help="re-derive the five optimal constants")
    p.add_argument("--format", **fmt)
    p.set_defaults(func=run_derive)

    p = sub.add_parser("eval", help="evaluate the kernel at one input")
    p.add_argument("--r", type=_magic_arg, default=CLASSIC_MAGIC,
                   help="seed constant (hex or decimal, default classic)")
    p.add_argument("--x", required=True,
                   help="input value, decimal or 0x bit pattern")
    p.add_argument("--iters", type=int, default=1,
                   help="Newton iterations (default 1)")
    p.add_argument("--format", **fmt)
    p.set_defaults(func=run_eval)

    p = sub.add_parser("sweep", help="measure max error over a bit-level sweep")
    p.add_argument("--r", type=_magic_arg, default=CLASSIC_MAGIC)
    p.add_argument("--iters", type=int, default=1)
    p.add_argument("--level", choices=("quick", "exhaustive"),
                   default="quick",
                   help="quick: random sample; exhaustive: all of [1, 4)")
    p.add_argument("--samples", type=int, default=4000,
                   help="sample count for --level quick")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path,
                   help="write the error cloud as CSV plus a rendered figure")
    p.add_argument("--format", **fmt)
    p.set_defaults(func=run_sweep)

    p = sub.add_parser("verify", help="check the seed model, error windows "
                                      "and scaling law")
    p.add_argument("--level", choices=("quick", "exhaustive"),
                   default="quick")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=run_verify)

    p = sub.add_parser("bench", help="time the kernel against library sqrt")
    p.add_argument("--r", type=_magic_arg, default=CLASSIC_MAGIC)
    p.add_argument("--samples", type=int, default=20,
                   help="timed repetitions per configuration")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=run_bench)

    return parser


# ---------------------------------------------------------------------------
# output helpers


def _emit_records(records: List[Dict[str, object]], fmt: str) -> None:
    if fmt == "json-lines":
        for rec in records:
            print(json.dumps(rec))
    elif fmt == "csv":
        writer = csv.DictWriter(sys.stdout, fieldnames=list(records[0]))
        writer.writeheader()
        writer.writerows(records)


# ---------------------------------------------------------------------------
# subcommands


def run_derive(args: argparse.Namespace) -> int:
    results = derive_all()
    if args.format == "table":
        print("objective  k  t             R                        "
              "predicted max error")
        for r in results:
            print(f"{r.objective:<9}  {r.iterations}  {r.t_opt:.10f}  "
                  f"0x{r.magic:08X} ({r.magic})  {r.predicted_max_error:.6e}")
        return EXIT_OK
    records = [{
        "objective": r.objective,
        "iterations": r.iterations,
        "t": r.t_opt,
        "magic_hex": f"0x{r.magic:08X}",
        "magic": r.magic,
        "predicted_max_error": r.predicted_max_error,
        "balance_residual": r.balance_residual,
    } for r in results]
    _emit_records(records, args.format)
    return EXIT_OK


def run_eval(args: argparse.Namespace) -> int:
    x = _parse_x(args.x)
    config = KernelConfig.relaxed(args.r, args.iters)
    y = invsqrt(x, config)
    reference = 1.0 / math.sqrt(x)
    relative = float(y) / reference - 1.0
    record = {
        "x": float(x),
        "x_bits": f"0x{float_to_bits(x):08X}",
        "result": float(y),
        "result_bits": f"0x{float_to_bits(float(y)):08X}",
        "reference": reference,
        "error_relative": relative,
        "R": f"0x{args.r:08X}",
        "iterations": args.iters,
    }
    if args.format == "table":
        print(f"x          = {record['x']:.9g} ({record['x_bits']})")
        print(f"result     = {record['result']:.9g} ({record['result_bits']})")
        print(f"reference  = {reference:.17g}")
        print(f"rel_error  = {relative:+.6e}")
        return EXIT_OK
    _emit_records([record], args.format)
    return EXIT_OK


def _sweep_spec(args: argparse.Namespace) -> sweep_mod.SweepSpec:
    domain = (sweep_mod.DOMAIN_UNIT_EXHAUSTIVE if args.level == "exhaustive"
              else sweep_mod.DOMAIN_FULL_RANDOM)
    return sweep_mod.SweepSpec(magic=args.r, iterations=args.iters,
                               domain=domain, samples=args.samples,
                               rng_seed=args.seed)


def run_sweep(args: argparse.Namespace) -> int:
    spec = _sweep_spec(args)
    report = sweep_mod.sweep(spec)
    record = {
        "R": f"0x{report.magic:08X}",
        "iterations": report.iterations,
        "domain": report.domain,
        "checked": report.checked,
        "max_relative_error": report.max_relative_error,
        "argmax_relative_bits": f"0x{report.argmax_relative_bits:08X}",
        "max_absolute_error": report.max_absolute_error,
        "argmax_absolute_bits": f"0x{report.argmax_absolute_bits:08X}",
        "rng_seed": report.rng_seed,
    }
    if args.format == "table":
        print(f"R            = {record['R']}  (k={report.iterations}, "
              f"{report.domain}, {report.checked} inputs)")
        print(f"max relative = {report.max_relative_error:.9e} "
              f"at {record['argmax_relative_bits']}")
        print(f"max absolute = {report.max_absolute_error:.9e} "
              f"at {record['argmax_absolute_bits']} (normalized)")
    else:
        _emit_records([record], args.format)
    if args.out is not None:
        csv_path = Path(args.out)
        png_path = csv_path.with_suffix(".png")
        if png_path == csv_path:
            csv_path = csv_path.with_suffix(".csv")
        sample = sweep_mod.emit_cloud(spec, csv_path)
        figures.render_cloud(sample, png_path)
        print(f"wrote {csv_path} and {png_path}", file=sys.stderr)
    return EXIT_OK


class _Checks:
    def __init__(self) -> None:
        self.failed = 0

    def add(self, ok: bool, name: str, detail: str) -> None:
        if not ok:
            self.failed += 1
        print(f"{'ok  ' if ok else 'FAIL'} {name}: {detail}")


def _check_seed_model(checks: _Checks, magic: int, stride: int) -> None:
    report = sweep_mod.verify_seed_model(magic, stride=stride)
    detail = f"{report.checked} patterns, {report.mismatches} mismatches"
    if report.mismatch_bits:
        shown = ", ".join(f"0x{b:08X}" for b in report.mismatch_bits)
        detail += f" (first at {shown})"
    checks.add(report.mismatches == 0, f"seed model R=0x{magic:08X}", detail)
    checks.add(report.smooth_gap <= GAP_BOUND, f"smooth gap R=0x{magic:08X}",
               f"{report.smooth_gap:.3e} <= {GAP_BOUND:.1e}")


def run_verify(args: argparse.Namespace) -> int:
    checks = _Checks()
    stride = 1 if args.level == "exhaustive" else 257  # odd: both parities
    results = derive_all()
    magics = [CLASSIC_MAGIC] + [r.magic for r in results]
    for magic in dict.fromkeys(magics):
        _check_seed_model(checks, magic, stride)

    if args.level == "exhaustive":
        for r in results:
            spec = sweep_mod.SweepSpec(magic=r.magic, iterations=r.iterations)
            report = sweep_mod.sweep(spec)
            measured = (report.max_relative_error if r.objective == "relative"
                        else report.max_absolute_error)
            lo = r.predicted_max_error - WINDOW_BELOW
            hi = r.predicted_max_error + WINDOW_ABOVE
            checks.add(lo <= measured <= hi,
                       f"sweep {r.objective} k={r.iterations}",
                       f"predicted={r.predicted_max_error:.9e} "
                       f"measured={measured:.9e} "
                       f"window=[{lo:.9e}, {hi:.9e}]")
            if r.objective == "relative" and r.iterations == 2:
                checks.add(measured <= 5.6e-6, "sweep relative k=2 bound",
                           f"measured={measured:.9e} <= 5.6e-06")
        match = verify_rel_k2_matches_k1()
        checks.add(abs(match.difference) < 1e-9, "k=2 balance point",
                   f"|t2 - t1| = {abs(match.difference):.3e}")

    trials = 100_000 if args.level == "exhaustive" else 10_000
    scaling = sweep_mod.verify_scaling(CLASSIC_MAGIC, 2, trials, args.seed)
    checks.add(scaling.violations == 0, "scaling law",
               f"{scaling.trials} trials, {scaling.checked} checked, "
               f"{scaling.skipped} skipped, {scaling.violations} violations")

    injected = os.environ.get(_INJECT_ENV)
    if injected:
        # Undocumented: verify one extra seed constant from the environment.
        try:
            magic = _magic_arg(injected)
            _check_seed_model(checks, magic, stride)
        except (argparse.ArgumentTypeError, DomainError) as exc:
            checks.add(False, "injected R", str(exc))

    if checks.failed:
        print(f"{checks.failed} check(s) failed", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def _bench_workload(seed: int) -> List[float]:
    import numpy as np

    rng = np.random.default_rng(seed + 0xF15A)
    bits = rng.integers(0x00800000, 0x7F800000, size=128, dtype=np.uint32)
    return [bits_to_float(int(b)) for b in bits]


def run_bench(args: argparse.Namespace) -> int:
    reps = max(1, args.samples)
    xs = _bench_workload(args.seed)
    rows = [(f"invsqrt k={k}", KernelConfig.relaxed(args.r, k))
            for k in (0, 1, 2)]

    checksum = 0
    timings = {}
    for name, config in rows:
        for x in xs:  # warm-up and checksum pass, untimed
            checksum ^= float_to_bits(float(invsqrt(x, config)))
        start = time.perf_counter_ns()
        for _ in range(reps):
            for x in xs:
                invsqrt(x, config)
        timings[name] = (time.perf_counter_ns() - start) / (reps * len(xs))

    for x in xs:
        checksum ^= struct.unpack("<Q", struct.pack("<d", 1.0 / math.sqrt(x)))[0]
    start = time.perf_counter_ns()
    for _ in range(reps):
        for x in xs:
            1.0 / math.sqrt(x)
    timings["library 1/sqrt"] = (time.perf_counter_ns() - start) / (reps * len(xs))

    for name, ns in timings.items():
        print(f"{name:<16} {ns:10.1f} ns/op")
    ratio = timings["library 1/sqrt"] / timings["invsqrt k=2"]
    print(f"throughput ratio (library / invsqrt k=2): {ratio:.2f}x "
          f"(hardware-dependent, informational)")
    print(f"checksum: 0x{checksum:016X}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (None, 0) else int(exc.code)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"fisr: domain error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BracketError as exc:
        print(f"fisr: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"fisr: invalid argument: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"fisr: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entrypoint() -> NoReturn:
    raise SystemExit(main())
