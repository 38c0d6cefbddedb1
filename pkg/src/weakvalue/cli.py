"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 parse/evaluation error, 3 every
query was undefined (or there were none).  Machine output goes to standard
output; messages go to standard error.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import dsl, scenarios
from .errors import EvalError, WeakValueError
from .hilbert import TENSOR_SEP, TOL
from .measure import SpectralData, weak_value
from .meter import PointerModel, peak_weights, simulate_pointer
from .scenarios import BeamSplitter, QueryFailure
from .serialize import (FORMATS, SWEEP_COLUMNS, meter_payload, render, report_payload,
                        sweep_row, to_json)

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_DEGENERATE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _positive(text: str) -> float:
    v = float(text)
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _count(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    def options(suppress: bool) -> argparse.ArgumentParser:
        # subcommands must not reset values given before the subcommand name
        p = _Parser(add_help=False)
        p.add_argument("--format", choices=FORMATS,
                       default=argparse.SUPPRESS if suppress else "json")
        p.add_argument("--tol", type=_positive,
                       default=argparse.SUPPRESS if suppress else TOL,
                       help="tolerance used by the self-check notes (default 1e-10)")
        return p

    parser = _Parser(prog="weakvalue", description=__doc__.splitlines()[0],
                     parents=[options(False)])
    common = options(True)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("threebox", parents=[common], help="three-box report")
    sub.add_parser("hardy", parents=[common], help="Hardy double-interferometer report")
    p = sub.add_parser("mzi", parents=[common], help="single Mach-Zehnder report")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--beta", type=float, default=0.0)
    p = sub.add_parser("mzi-sweep", parents=[common], help="grid over (q, beta)")
    p.add_argument("--q-steps", type=_count, required=True)
    p.add_argument("--beta-steps", type=_count, required=True)
    p.add_argument("--out", type=Path)
    p = sub.add_parser("run", parents=[common], help="evaluate a .wks scenario file")
    p.add_argument("file", type=Path)
    p = sub.add_parser("meter", parents=[common], help="Gaussian pointer readout")
    p.add_argument("--scenario", choices=("threebox", "hardy"), required=True)
    p.add_argument("--op", required=True)
    p.add_argument("--g", type=_positive, required=True)
    p.add_argument("--sigma", type=_positive, required=True)
    return parser


def _cmd_threebox(args) -> tuple[str, int]:
    rep = scenarios.three_box(args.tol)
    return render("threebox", args.format, report_payload(rep)), EXIT_OK


def _cmd_hardy(args) -> tuple[str, int]:
    rep = scenarios.hardy(tol=args.tol)
    return render("hardy", args.format, report_payload(rep)), EXIT_OK


def _cmd_mzi(args) -> tuple[str, int]:
    try:
        bs = BeamSplitter.from_q(args.q, args.beta)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep = scenarios.mzi(bs, args.tol)
    return render("mzi", args.format, report_payload(rep)), EXIT_OK


def _cmd_mzi_sweep(args) -> tuple[str, int]:
    qs = scenarios.open_grid(args.q_steps)
    betas = scenarios.phase_grid(args.beta_steps)
    reports = scenarios.mzi_sweep(qs, betas, args.tol)
    rows = []
    grid = [(q, b) for q in qs for b in betas]
    for rep, (q, b) in zip(reports, grid):
        rows.append(sweep_row(rep, q, math.sqrt(1.0 - q * q), b))
    payload = [dict(zip(SWEEP_COLUMNS, row)) for row in rows]
    text = render("mzi-sweep", args.format, payload, SWEEP_COLUMNS, rows)
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
        print(f"wrote {len(rows)} rows to {args.out}", file=sys.stderr)
        return "", EXIT_OK
    return text, EXIT_OK


def _cmd_run(args) -> tuple[str, int]:
    try:
        source = args.file.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {args.file}: {exc.strerror}") from None
    try:
        program = dsl.parse(source)
    except dsl.ParseError as exc:
        print(exc.render(str(args.file)), file=sys.stderr)
        return "", EXIT_PARSE
    try:
        rep = dsl.evaluate(program, name=args.file.name)
    except EvalError as exc:
        print(f"{args.file}: evaluation error: {exc}", file=sys.stderr)
        return "", EXIT_PARSE
    n_queries = len(program.queries)
    n_failed = len(rep.failures())
    code = EXIT_OK
    if n_queries == 0 or n_failed == n_queries:
        print(f"{args.file}: no query produced a value ({n_queries} queries)", file=sys.stderr)
        code = EXIT_DEGENERATE
    return render(f"run:{args.file.name}", args.format, report_payload(rep)), code


def _meter_setup(scenario: str, op_name: str):
    if scenario == "threebox":
        pp, ops = scenarios.three_box_prepost(), scenarios.three_box_operators()
    else:
        pp, ops = scenarios.hardy_prepost(), scenarios.hardy_operators()
    key = op_name.replace("*", TENSOR_SEP)
    if key not in ops:
        raise UsageError(f"unknown operator {op_name!r} for {scenario}; "
                         f"choose from {', '.join(ops)}")
    return pp, ops[key], key


def _cmd_meter(args) -> tuple[str, int]:
    pp, op, key = _meter_setup(args.scenario, args.op)
    spec = SpectralData.for_projector(op)
    model = PointerModel(args.g, args.sigma)
    try:
        outcome = simulate_pointer(spec, pp, model)
        peaks = peak_weights(spec, pp, model)
    except WeakValueError as exc:
        print(f"meter: {exc}", file=sys.stderr)
        return to_json({"error": exc.code}) if args.format == "json" else "", EXIT_DEGENERATE
    try:
        weak = weak_value(op, pp)
    except WeakValueError as exc:
        weak = QueryFailure.from_exc(exc)
    payload = meter_payload(outcome, model, outcome.pointer_mean / model.g, peaks, weak)
    return render(f"meter:{args.scenario}:{key}", args.format, payload), EXIT_OK


COMMANDS = {
    "threebox": _cmd_threebox,
    "hardy": _cmd_hardy,
    "mzi": _cmd_mzi,
    "mzi-sweep": _cmd_mzi_sweep,
    "run": _cmd_run,
    "meter": _cmd_meter,
}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        text, code = COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
