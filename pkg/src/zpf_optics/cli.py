"""Command-line front end.

`zpf run` executes built-in or user-written experiment programs, expands
parameter sweeps, and writes one CSV row per concrete sweep point.  `zpf
analytic` evaluates the closed-form curves without Monte Carlo.  `zpf
check` cross-validates the simulator against the closed forms and prints
pass/fail lines.

Exit codes: 0 success, 1 usage error, 2 parse/validation error, 3 runtime
error (degenerate denominator).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .analytics import (dark_click_prob, dc_single_click_probs,
                        dw_conditional_probs, marcum_q1, marcum_q1_lower,
                        r_min, witness_idw, witness_w2)
from .builtins import DWProtocolSettings, builtin
from .analytics import HeraldSettings
from .core import SQRT2, GlobalConfig
from .dsl import DslError, ExperimentSpec, SweepRange, expand_sweeps, parse, sweep_axes
from .engine import DegenerateDenominatorError, EvaluationError, run_ensemble
from .protocols import dw_witness_point, herald_witness_point

CSV_HEADER = f"# zpf-optics v{__version__}"


class UsageError(Exception):
    pass


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(columns: Sequence[str], rows: Iterable[Sequence[object]],
              out_path: Optional[str]) -> str:
    """Render the versioned CSV; write to out_path when given, otherwise
    return it for stdout."""

    lines = [CSV_HEADER, ",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    return text


def parse_sweep_value(text: str) -> SweepRange:
    """Sweep syntax: `lo:hi:logN` (log-spaced), `lo:hi:linN` (linear), or a
    comma-separated value list."""

    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"bad sweep spec {text!r}; expected lo:hi:logN or lo:hi:linN")
        lo_s, hi_s, count_s = parts
        try:
            lo, hi = float(lo_s), float(hi_s)
        except ValueError:
            raise UsageError(f"bad sweep bounds in {text!r}") from None
        if count_s.startswith("log"):
            spaced = np.geomspace
        elif count_s.startswith("lin"):
            spaced = np.linspace
        else:
            raise UsageError(f"bad sweep count {count_s!r}; expected logN or linN")
        try:
            count = int(count_s[3:])
        except ValueError:
            raise UsageError(f"bad sweep count {count_s!r}") from None
        if count < 1:
            raise UsageError("sweep count must be at least 1")
        if spaced is np.geomspace and (lo <= 0 or hi <= 0):
            raise UsageError("log sweeps need positive bounds")
        values = tuple(float(v) for v in spaced(lo, hi, count))
        return SweepRange(values=values)
    try:
        values = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"bad sweep value list {text!r}") from None
    return SweepRange(values=values)


def parse_angle(text: str) -> float:
    """Angle option value: plain radians, or a number suffixed with `deg`
    or `rad`."""

    raw = text.strip()
    scale = 1.0
    if raw.endswith("deg"):
        raw, scale = raw[:-3], math.pi / 180.0
    elif raw.endswith("rad"):
        raw = raw[:-3]
    try:
        return float(raw) * scale
    except ValueError:
        raise UsageError(f"bad angle {text!r}") from None


# --- zpf run -------------------------------------------------------------------

def _load_spec(args: argparse.Namespace) -> ExperimentSpec:
    if args.builtin:
        spec = builtin(args.builtin)
    else:
        try:
            with open(args.file, "r", encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise UsageError(f"cannot read {args.file}: {exc}") from None
        spec = parse(text)
    spec = spec.with_run_options(trials=args.trials, seed=args.seed)
    for item in args.sweep or []:
        if "=" not in item:
            raise UsageError(f"bad --sweep {item!r}; expected PARAM=spec")
        name, _, value = item.partition("=")
        try:
            spec = spec.with_params(**{name: parse_sweep_value(value)})
        except KeyError as exc:
            raise DslError(str(exc.args[0])) from None
    return spec


def _run_rows(spec: ExperimentSpec, workers: int,
              ) -> Tuple[List[str], List[List[object]], List[str]]:
    axes = sweep_axes(spec)
    key_columns = axes if axes else [name for name, _ in spec.params]
    points = expand_sweeps(spec)
    summary: List[str] = []

    if isinstance(spec.witness_settings, DWProtocolSettings):
        columns = key_columns + ["numerator", "denominator", "estimate",
                                 "ci_lo", "ci_hi", "det_w2", "idw", "r_min"]
        rows = []
        for point in points:
            result = dw_witness_point(point.param_dict["alpha2"], spec=point,
                                      workers=workers)
            ref = result.reference
            rows.append([point.param_dict[k] for k in key_columns]
                        + [ref.numerator, ref.denominator, ref.estimate,
                           ref.ci95[0], ref.ci95[1],
                           result.det_w2, result.idw, result.r_min])
        summary.append(f"witness points: {len(rows)}")
        return columns, rows, summary

    if isinstance(spec.witness_settings, HeraldSettings):
        columns = key_columns + ["numerator", "denominator", "estimate",
                                 "ci_lo", "ci_hi", "idw", "r_min"]
        rows = []
        for point in points:
            result = herald_witness_point(point.param_dict["r"], spec=point,
                                          workers=workers)
            total = sum(result.coincidences.values())
            rows.append([point.param_dict[k] for k in key_columns]
                        + [None, total, result.p1[(3, 1, 1)], None, None,
                           result.idw, result.r_min])
        summary.append(f"witness points: {len(rows)}")
        return columns, rows, summary

    columns = key_columns + ["numerator", "denominator", "estimate", "ci_lo", "ci_hi"]
    rows = []
    denominators = []
    for point in points:
        stats = run_ensemble(point, workers=workers)
        denominators.append(stats.denominator)
        rows.append([point.param_dict[k] for k in key_columns]
                    + [stats.numerator, stats.denominator, stats.estimate,
                       stats.ci95[0], stats.ci95[1]])
    mean_den = sum(denominators) / len(denominators)
    summary.append(f"points: {len(rows)}, trials/point: {spec.trials}")
    summary.append(f"mean coincidences/run (denominator): {mean_den:.1f}")
    return columns, rows, summary


def cmd_run(args: argparse.Namespace) -> int:
    spec = _load_spec(args)
    workers = args.threads if args.threads else (os.cpu_count() or 1)
    columns, rows, summary = _run_rows(spec, workers)
    text = write_csv(columns, rows, args.out)
    if args.out:
        print(f"experiment {spec.name!r}: wrote {len(rows)} row(s) to {args.out}")
        for line in summary:
            print(line)
    else:
        sys.stdout.write(text)
        for line in summary:
            print(line, file=sys.stderr)
    return 0


# --- zpf analytic ----------------------------------------------------------------

def _analytic_rows(args: argparse.Namespace) -> Tuple[List[str], List[List[object]]]:
    config = GlobalConfig()
    if args.subject == "dc":
        theta = parse_angle(args.theta)
        phis = np.linspace(0.0, 2.0 * math.pi, args.points)
        rows = []
        for phi in phis:
            big_p1, big_p2 = dc_single_click_probs(args.alpha, float(phi), theta,
                                                   config, with_bs2=not args.no_bs2)
            rows.append([float(phi), big_p1 * (1.0 - big_p2), (1.0 - big_p1) * big_p2])
        return ["phi", "p1", "p2"], rows
    if args.subject == "dw":
        sweep = parse_sweep_value(args.alpha2)
        rows = []
        for alpha2 in sweep.expand():
            alpha = math.sqrt(alpha2)
            idw = witness_idw(alpha, config)
            rows.append([alpha2, witness_w2(alpha, config), idw, r_min(idw)])
        return ["alpha2", "det_w2", "idw", "r_min"], rows
    if args.subject == "rmin":
        return ["idw", "r_min"], [[args.idw, r_min(args.idw)]]
    if args.subject == "marcum":
        return (["a", "b", "q1", "lower"],
                [[args.a, args.b, marcum_q1(args.a, args.b),
                  marcum_q1_lower(args.a, args.b)]])
    raise UsageError(f"unknown analytic subject {args.subject!r}")


def cmd_analytic(args: argparse.Namespace) -> int:
    columns, rows = _analytic_rows(args)
    text = write_csv(columns, rows, args.out)
    if args.out:
        print(f"wrote {len(rows)} row(s) to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


# --- zpf check -------------------------------------------------------------------

def _check_lines() -> Tuple[List[str], bool]:
    config = GlobalConfig()
    lines: List[str] = []
    ok = True

    def report(label: str, passed: bool, detail: str) -> None:
        nonlocal ok
        ok = ok and passed
        lines.append(f"{'PASS' if passed else 'FAIL'} {label}: {detail}")

    gamma_arg = SQRT2 * config.gamma / config.sigma0
    identity_err = abs(marcum_q1(0.0, gamma_arg)
                       - math.exp(-config.gamma ** 2 / config.sigma0 ** 2))
    report("marcum-identity", identity_err < 1e-12, f"|error| = {identity_err:.2e}")

    trials = 200_000
    vac = parse('experiment "vacuum"\nmode a\nsource vacuum -> a\n'
                'detector D1 on a\npostselect click(D1)\n'
                f"trials {trials}\nseed 0\n")
    stats = run_ensemble(vac)
    p_dark = dark_click_prob(config)
    sigma = math.sqrt(p_dark * (1 - p_dark) / trials)
    report("dark-count", abs(stats.estimate - p_dark) < 4 * sigma,
           f"mc = {stats.estimate:.6f}, closed form = {p_dark:.6f}")

    dc = builtin("dc").with_params(phi=1.0, theta=0.0).with_run_options(trials=trials)
    stats = run_ensemble(dc)
    big_p1, big_p2 = dc_single_click_probs(0.1, 1.0, 0.0, config)
    p_cf = big_p1 * (1.0 - big_p2)
    sigma = math.sqrt(p_cf * (1 - p_cf) / trials)
    report("dc-point", abs(stats.estimate - p_cf) < 4 * sigma,
           f"mc = {stats.estimate:.6f}, closed form = {p_cf:.6f}")

    alpha2, delta = 1.3, 0.7
    dw = builtin("dw").with_params(alpha2=alpha2, alpha=math.sqrt(alpha2),
                                   delta=delta).with_run_options(trials=trials)
    stats = run_ensemble(dw)
    p1_cf, _ = dw_conditional_probs(math.sqrt(alpha2), delta, config)
    sigma = math.sqrt(p1_cf * (1 - p1_cf) / stats.denominator)
    report("dw-point", abs(stats.estimate - p1_cf) < 4 * sigma,
           f"mc = {stats.estimate:.6f}, closed form = {p1_cf:.6f}")

    return lines, ok


def cmd_check(args: argparse.Namespace) -> int:
    lines, ok = _check_lines()
    for line in lines:
        print(line)
    return 0 if ok else 3


# --- entry point -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zpf",
                                     description="Monte-Carlo and closed-form "
                                                 "analysis of threshold-detector "
                                                 "optics experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment program")
    target = run.add_mutually_exclusive_group(required=True)
    target.add_argument("--builtin", help="name of a built-in experiment")
    target.add_argument("--file", help="path to a DSL program")
    run.add_argument("--seed", type=int, default=None, help="RNG seed (u64)")
    run.add_argument("--trials", type=int, default=None, help="trials per point")
    run.add_argument("--threads", type=int, default=None,
                     help="worker threads (default: machine parallelism)")
    run.add_argument("--sweep", action="append", metavar="P=SPEC",
                     help="sweep a parameter: lo:hi:logN, lo:hi:linN, or v1,v2,...")
    run.add_argument("--out", help="CSV output path (default: stdout)")
    run.set_defaults(func=cmd_run)

    analytic = sub.add_parser("analytic", help="evaluate closed-form curves")
    analytic.add_argument("subject", choices=("dc", "dw", "rmin", "marcum"))
    analytic.add_argument("--alpha", type=float, default=0.1)
    analytic.add_argument("--theta", default="0", help="wave-plate angle (e.g. 45deg)")
    analytic.add_argument("--points", type=int, default=25)
    analytic.add_argument("--no-bs2", action="store_true",
                          help="dc: remove the recombining beam splitter")
    analytic.add_argument("--alpha2", default="1.0",
                          help="dw: intensity value or sweep (lo:hi:logN)")
    analytic.add_argument("--idw", type=float, default=3.0)
    analytic.add_argument("--a", type=float, default=0.0)
    analytic.add_argument("--b", type=float, default=1.0)
    analytic.add_argument("--out", help="CSV output path (default: stdout)")
    analytic.set_defaults(func=cmd_analytic)

    check = sub.add_parser("check", help="cross-validate simulator vs closed forms")
    check.set_defaults(func=cmd_check)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage and 0 on --help
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DslError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DegenerateDenominatorError, EvaluationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
