"""Command-line entry point: ``qutrit-battery <subcommand> [options]``.

Exit codes: 0 success, 2 config error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import sys

from . import experiments
from .errors import ConfigError, NumericError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

log = logging.getLogger("qutrit_battery")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="config file of 'key = value' lines")
    common.add_argument(
        "--override",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override one config key (repeatable, applied after the file)",
    )
    common.add_argument("--out", help="CSV output path (default: stdout)")
    common.add_argument("--workers", type=int, default=1, help="parallel sweep workers")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="qutrit-battery",
        description="Three-level adiabatic quantum battery: charging, sweeps and self-discharge.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("charge", parents=[common], help="one charging trajectory -> per-sample CSV")
    sub.add_parser("sweep", parents=[common], help="final ergotropy and power over a tau grid")
    sub.add_parser("self-discharge", parents=[common], help="closed-form discharge curves per gap ratio")
    sub.add_parser("validate-config", parents=[common], help="parse the config and print it expanded")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = experiments.load_config(args.config, args.override)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = args.out if args.out else sys.stdout
    try:
        if args.command == "validate-config":
            sys.stdout.write(config.to_text())
        elif args.command == "charge":
            experiments.run_charge(config, out)
        elif args.command == "sweep":
            if args.workers < 1:
                raise ConfigError("--workers must be >= 1")
            rows = experiments.run_sweep(config, out, workers=args.workers)
            failed = [r for r in rows if r.error]
            if failed:
                print(f"{len(failed)} sweep point(s) failed", file=sys.stderr)
                return EXIT_NUMERIC
        elif args.command == "self-discharge":
            experiments.run_self_discharge(config, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
