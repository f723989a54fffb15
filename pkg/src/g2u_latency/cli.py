"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, NumericalError
from .geometry import Position3D
from .engine import (
    RELAY_INDEX_POSITIONS, evaluate_point, load_scenario, optimize_relay, power_vs_delay,
    preset_case, preset_relay, relay_profile_result, scenario_to_dict, sweep_height, sweep_relay,
    sweep_snr, to_csv, to_rows_json,
)
from .relaylink import RelayConfig

log = logging.getLogger("g2u_latency")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _grid(lo: float, hi: float, step: float) -> list[float]:
    if step <= 0:
        raise ConfigError("grid step must be positive")
    n = int(round((hi - lo) / step)) + 1
    return [float(v) for v in np.linspace(lo, hi, n)]


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--scenario", type=Path, help="JSON scenario file")
    p.add_argument("--case", type=int, choices=(1, 2, 3), default=None)
    p.add_argument("--height", type=float, default=None, help="receiver height in m")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--realizations", type=int, default=None, help="default 1000")
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--rho-mode", choices=("fixed", "optimize"), default=None)
    p.add_argument("--phi-e", type=float, default=None, help="target error probability, default 1e-4")
    p.add_argument("--regime", choices=("interference-limited", "noise-plus-interference"), default=None)
    p.add_argument("--target-snr-db", type=float, default=None, help="pin the mean received SNR")
    p.add_argument("--relay-noise", choices=("on", "off"), default=None)
    p.add_argument("--jobs", type=int, default=1, help="worker threads (results do not depend on it)")
    p.add_argument("--out", type=Path, help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--meta", type=Path, help="write the resolved scenario to this JSON file")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="g2u-latency", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()

    p = sub.add_parser("eval", parents=[common], help="single-point report")

    p = sub.add_parser("sweep-height", parents=[common], help="metric against receiver height")
    p.add_argument("--z-min", type=float, default=50.0)
    p.add_argument("--z-max", type=float, default=500.0)
    p.add_argument("--z-step", type=float, default=50.0)
    p.add_argument("--metric", choices=("delay", "sir", "capacity"), default="delay")

    p = sub.add_parser("sweep-snr", parents=[common], help="minimum delay against mean SNR")
    p.add_argument("--snr-min", type=float, default=0.0)
    p.add_argument("--snr-max", type=float, default=50.0)
    p.add_argument("--snr-step", type=float, default=2.5)
    p.add_argument("--with-interference", action="store_true")

    p = sub.add_parser("power-curve", parents=[common], help="minimum power against delay limit")
    p.add_argument("--d-max", type=_floats, default=[30.0, 40.0, 60.0, 80.0, 100.0, 150.0, 200.0])
    p.add_argument("--nip-db", type=_floats, default=[-10.0, 0.0, 10.0])

    p = sub.add_parser("sweep-relay", parents=[common], help="delay surface over relay position and height")
    p.add_argument("--relay-y", type=_floats, default=None, help="relay y positions (default: index set)")
    p.add_argument("--relay-z", type=float, default=50.0)
    p.add_argument("--z-min", type=float, default=100.0)
    p.add_argument("--z-max", type=float, default=500.0)
    p.add_argument("--z-step", type=float, default=50.0)

    p = sub.add_parser("optimize-relay", parents=[common], help="best relay y at fixed height")
    p.add_argument("--y-min", type=float, default=-250.0)
    p.add_argument("--y-max", type=float, default=500.0)
    p.add_argument("--relay-z", type=float, default=50.0)
    p.add_argument("--points", type=int, default=41)
    return parser


def resolve_scenario(args, need_relay: bool = False):
    if args.scenario is not None:
        s = load_scenario(args.scenario)
        if args.height is not None:
            s = s.with_receiver_height(args.height)
    elif need_relay:
        s = preset_relay(height=args.height or 250.0)
    else:
        s = preset_case(args.case or 1, args.height or 100.0)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.realizations is not None:
        changes["realizations"] = args.realizations
    if args.regime is not None:
        changes["channel_regime"] = args.regime.replace("-", "_")
    if args.target_snr_db is not None:
        changes["target_avg_snr_db"] = args.target_snr_db
    rel = {}
    if args.rho is not None:
        rel["rho"] = args.rho
    if args.rho_mode is not None:
        rel["rho_mode"] = args.rho_mode
    if args.phi_e is not None:
        rel["phi_e"] = args.phi_e
    if rel:
        changes["reliability"] = dataclasses.replace(s.reliability, **rel)
    if changes:
        s = s.replace(**changes)
    if need_relay and s.relay is None:
        s = s.replace(relay=RelayConfig(RELAY_INDEX_POSITIONS[2], noise_at_relay=False))
    if args.relay_noise is not None:
        if s.relay is None:
            raise ConfigError("--relay-noise given but the scenario has no relay")
        s = s.replace(relay=dataclasses.replace(s.relay, noise_at_relay=args.relay_noise == "on"))
    return s


def run(args) -> object:
    cmd = args.command
    s = resolve_scenario(args, need_relay=cmd in ("sweep-relay", "optimize-relay"))
    if args.meta is not None:
        args.meta.write_text(json.dumps(scenario_to_dict(s), indent=2, sort_keys=True) + "\n")
    if cmd == "eval":
        from .engine import SweepResult
        return SweepResult("receiver_z_m", [evaluate_point(s, s.receiver.z)])
    if cmd == "sweep-height":
        return sweep_height(s, _grid(args.z_min, args.z_max, args.z_step), args.metric, jobs=args.jobs)
    if cmd == "sweep-snr":
        return sweep_snr(s, _grid(args.snr_min, args.snr_max, args.snr_step),
                         include_interference=args.with_interference, jobs=args.jobs)
    if cmd == "power-curve":
        return power_vs_delay(s, args.d_max, args.nip_db)
    if cmd == "sweep-relay":
        if args.relay_y is None:
            positions = list(RELAY_INDEX_POSITIONS)
        else:
            positions = [Position3D(s.relay.position.x, y, args.relay_z) for y in args.relay_y]
        return sweep_relay(s, positions, _grid(args.z_min, args.z_max, args.z_step), jobs=args.jobs)
    if cmd == "optimize-relay":
        opt = optimize_relay(s, (args.y_min, args.y_max, args.relay_z), coarse_points=args.points)
        log.info("optimal relay at %s, delay %.6g symbols (unimodal=%s)",
                 opt.position.as_tuple(), opt.delay, opt.unimodal)
        return relay_profile_result(opt)
    raise ConfigError(f"unknown command {cmd!r}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        result = run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = to_csv(result) if args.format == "csv" else to_rows_json(result) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_bytes(text.encode())
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
