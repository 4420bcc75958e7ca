"""Command-line driver.

Exit codes: 0 all gating checks pass, 1 a check failed, 2 pipeline or
evaluation error, 3 I/O error, 4 unknown check label or expression name.
"""
from __future__ import annotations

import argparse
import sys

from . import catalog as cat
from .coeff import PoleAtPoint, dispersion_w2, group_velocity, w
from .hierarchy import PipelineError, run_pipeline
from .report import FORMATS, RunConfig, write_reports
from .syntax import ParseError, parse_scalar
from .verify import CHECKS, DESCRIPTIONS, run_checks

OK, CHECK_FAILED, PIPELINE_ERROR, IO_ERROR, UNKNOWN = 0, 1, 2, 3, 4

NAMED = {
    "w2": dispersion_w2,
    "w": lambda: w,
    "Vg": group_velocity,
    "kdv_disp": lambda: cat.kdv_coefficients()[3],
    "G": cat.vanishing_bracket,
    "G_reduced": cat.vanishing_bracket_reduced,
    "Ck": cat.Ck,
    "ls_time": cat.ls_time_coefficient,
    "ls_coupling": cat.ls_coupling,
    "W_resonance": cat.negative_resonance_W,
}


def resolve_expression(text):
    """Named identifier from NAMED, or an inline scalar expression."""
    if text in NAMED:
        return NAMED[text]()
    return parse_scalar(text)


def _config(args):
    formats = tuple(args.format) if args.format else FORMATS
    return RunConfig(
        max_order=args.max_order,
        suppress_homogeneous=args.suppress_homogeneous,
        surface=args.surface,
        points=((args.k, args.W),),
        out=args.out,
        formats=formats,
    )


def _mark(r):
    return "PASS" if r.passed else ("FAIL" if r.gating else "FLAG")


def _derive(cfg):
    ledger = run_pipeline(problem=cfg.problem())
    return ledger, run_checks(ledger)


def cmd_derive(args):
    cfg = _config(args)
    if cfg.suppress_homogeneous:
        print("warning: homogeneous amplitudes suppressed; expect the first-harmonic balance to fail", file=sys.stderr)
    ledger, results = _derive(cfg)
    write_reports(ledger, results, cfg)
    failed = [r for r in results if r.gating and not r.passed]
    for r in failed:
        print(f"FAIL {r.label}: {r.summary}", file=sys.stderr)
    flagged = sum(1 for r in results if not r.gating and not r.passed)
    passed = sum(1 for r in results if r.passed)
    print(f"{passed}/{len(results)} checks pass, {len(failed)} failed, {flagged} flagged; reports in {cfg.out}")
    return CHECK_FAILED if failed else OK


def cmd_check(args):
    unknown = [lab for lab in args.labels if lab not in CHECKS]
    if unknown:
        print(f"unknown check label: {', '.join(unknown)}", file=sys.stderr)
        return UNKNOWN
    cfg = _config(args)
    labels = args.labels or list(CHECKS)
    need = max(CHECKS[lab][0] for lab in labels)
    if args.labels and need > cfg.max_order:
        print(f"check needs order {need} but --max-order is {cfg.max_order}", file=sys.stderr)
        return PIPELINE_ERROR
    ledger = run_pipeline(max_order=min(cfg.max_order, need), problem=cfg.problem())
    results = run_checks(ledger, labels)
    for r in results:
        print(f"{_mark(r)} {r.label}: {r.summary}")
        if not r.passed and r.expected:
            print(f"  expected: {r.expected}")
            print(f"  derived:  {r.derived}")
        if r.diff:
            print(f"  derived - expected: {r.diff}")
    return OK if all(r.passed for r in results if r.gating) else CHECK_FAILED


def cmd_eval(args):
    try:
        z = resolve_expression(args.expr)
    except ParseError as exc:
        print(f"unknown expression {args.expr!r}: {exc}", file=sys.stderr)
        return UNKNOWN
    try:
        v = z.evaluate(args.k, args.W)
    except PoleAtPoint as exc:
        print(f"pole at (k, W) = ({args.k}, {args.W}): {exc}", file=sys.stderr)
        return PIPELINE_ERROR
    if isinstance(v, complex):
        print(f"{v.real:.12g}{v.imag:+.12g}j" if v.imag else f"{v.real:.12g}")
    else:
        print(f"{v:.12g}")
    return OK


def cmd_report(args):
    cfg = _config(args)
    ledger, results = _derive(cfg)
    for p in write_reports(ledger, results, cfg):
        print(p)
    return OK


def parser():
    p = argparse.ArgumentParser(prog="wwscales", description="Multiple-scales derivation for capillary-gravity water waves.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-order", type=int, default=5, choices=range(1, 6), metavar="N")
    common.add_argument("--suppress-homogeneous", action="store_true")
    common.add_argument("--surface", choices=("flat", "taylor"), default="flat")
    common.add_argument("--k", type=float, default=1.0)
    common.add_argument("--W", type=float, default=2.0)
    common.add_argument("--out", default=".")
    common.add_argument("--format", action="append", choices=FORMATS)
    sub = p.add_subparsers(dest="cmd", required=True)
    sub.add_parser("derive", parents=[common], help="run the derivation and all checks; write reports")
    c = sub.add_parser("check", parents=[common], help="run catalog checks (all when no label is given)")
    c.add_argument("labels", nargs="*")
    e = sub.add_parser("eval", parents=[common], help="evaluate a named or inline coefficient at (k, W)")
    e.add_argument("expr")
    sub.add_parser("report", parents=[common], help="write report files")
    sub.add_parser("labels", help="list check labels")
    return p


def main(argv=None):
    args = parser().parse_args(argv)
    if args.cmd == "labels":
        for lab in CHECKS:
            print(f"{lab}: {DESCRIPTIONS.get(lab, '')}")
        return OK
    handler = {"derive": cmd_derive, "check": cmd_check, "eval": cmd_eval, "report": cmd_report}[args.cmd]
    try:
        return handler(args)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return IO_ERROR
    except (PipelineError, ArithmeticError) as exc:
        print(f"pipeline error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return PIPELINE_ERROR


if __name__ == "__main__":
    sys.exit(main())
