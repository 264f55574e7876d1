"""Command-line entry point.

Exit codes: 0 success, 2 config error, 3 simulation error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import ConfigError, MissingArtifact, SimulationError
from .oscillator import CircuitParams, capacitance_from_duty, timing_from_params

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SIMULATION = 3
EXIT_IO = 4

log = logging.getLogger("touchemc")


def _add_circuit_args(p: argparse.ArgumentParser, with_c_sen: bool = True) -> None:
    p.add_argument("--r1", type=float, required=True, help="R1 (ohm)")
    p.add_argument("--r2", type=float, required=True, help="R2 (ohm)")
    p.add_argument("--r-ref", type=float, required=True, help="Rref (ohm)")
    p.add_argument("--c-int", type=float, required=True, help="CInt (F)")
    p.add_argument("--c-off", type=float, required=True, help="Coff (F)")
    if with_c_sen:
        p.add_argument("--c-sen", type=float, required=True, help="Csen (F)")
    p.add_argument("--v-rail", type=float, default=2.5, help="supply magnitude (V, default 2.5)")
    p.add_argument("--edge-time", type=float, default=10e-9, help="output edge time (s, default 10 ns)")
    p.add_argument("--json", action="store_true", help="print JSON instead of text")


def _circuit(args: argparse.Namespace, c_sen: float | None = None) -> CircuitParams:
    return CircuitParams(
        r1=args.r1, r2=args.r2, r_ref=args.r_ref, c_int=args.c_int, c_off=args.c_off,
        c_sen=args.c_sen if c_sen is None else c_sen, v_rail=args.v_rail, edge_time=args.edge_time,
    )


def cmd_timing(args: argparse.Namespace) -> int:
    sol = timing_from_params(_circuit(args))
    if args.json:
        print(json.dumps(sol.to_dict(), sort_keys=True))
    else:
        print(f"K      = {sol.k:.6g}")
        print(f"J      = {sol.j:.6g}")
        print(f"t_on   = {sol.t_on:.6g} s")
        print(f"t_off  = {sol.t_off:.6g} s")
        print(f"f_osc  = {sol.f_osc:.6g} Hz")
        print(f"duty   = {sol.duty:.6g}")
    return EXIT_OK


def cmd_decode(args: argparse.Namespace) -> int:
    p = _circuit(args, c_sen=args.c_off)
    c_sen = capacitance_from_duty(args.duty, p)
    if args.json:
        print(json.dumps({"duty": args.duty, "c_sen": c_sen}))
    else:
        print(f"c_sen = {c_sen:.9g} F")
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    from .config import load_config
    from .runner import run_config

    kind = load_config(args.config).kind
    if kind != args.command:
        raise ConfigError(f"config kind is '{kind}', not '{args.command}'")
    for path in run_config(args.config, args.out):
        print(path)
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    from .runner import compare_emissions, format_comparison

    report = compare_emissions(args.run_a, args.run_b, (args.band[0], args.band[1]))
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(format_comparison(report))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="touchemc",
        description="Capacitive touch-sensor oscillator timing and EMC emission simulation.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("timing", help="closed-form oscillator timing")
    _add_circuit_args(p)
    p.set_defaults(func=cmd_timing)

    p = sub.add_parser("decode", help="sensing capacitance from a measured duty cycle")
    p.add_argument("--duty", type=float, required=True, help="duty cycle in [0.5, 1)")
    _add_circuit_args(p, with_c_sen=False)
    p.set_defaults(func=cmd_decode)

    for name, text in (("conducted", "run a conducted-emission scenario"),
                       ("nearfield", "run a near-field drive-frequency sweep")):
        p = sub.add_parser(name, help=text)
        p.add_argument("config", help="YAML run configuration")
        p.add_argument("-o", "--out", default=None, help="output directory")
        p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="compare the V_P spectra of two conducted runs")
    p.add_argument("run_a")
    p.add_argument("run_b")
    p.add_argument("--band", type=float, nargs=2, metavar=("F1", "F2"), default=(150e3, 1e6),
                   help="band in Hz (default 150e3 1e6)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulationError as exc:
        print(f"simulation error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    except (OSError, MissingArtifact) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
