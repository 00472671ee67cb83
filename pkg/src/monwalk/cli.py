"""Command line entry point: ``monwalk run <config.json>``.

Exit codes: 0 success, 2 configuration error, 3 basis validation failure,
4 numerical or verification failure, 5 output not writable.
"""

import argparse
import logging
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .errors import BasisError, MonwalkError
from .runner import OutputError, Run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BASIS = 3
EXIT_NUMERICAL = 4
EXIT_OUTPUT = 5


def build_parser():
    parser = argparse.ArgumentParser(
        prog="monwalk", description="Monitored quantum walk experiments"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run an experiment configuration")
    run.add_argument("config", help="JSON experiment configuration")
    run.add_argument("--out-dir", default=None, help="output directory (default: cwd)")
    run.add_argument("--threads", type=int, default=1, help="worker threads")
    run.add_argument(
        "--verify",
        action="store_true",
        help="cross-check amplitudes and closed forms; fail the run on mismatch",
    )
    run.add_argument("-v", "--verbose", action="store_true")
    return parser


def run_command(args):
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error at {exc.field}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = Path(args.out_dir) if args.out_dir else Path.cwd()
    try:
        run = Run(cfg, out_dir, threads=args.threads)
        manifest = run.execute(verify=args.verify)
    except ConfigError as exc:
        print(f"config error at {exc.field}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BasisError as exc:
        print(f"basis error: {exc}", file=sys.stderr)
        return EXIT_BASIS
    except OutputError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    except (MonwalkError, ArithmeticError, ValueError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for entry in manifest["outputs"]:
        logging.info("wrote %s", entry["path"])
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    if args.command == "run":
        if args.threads < 1:
            print("--threads must be >= 1", file=sys.stderr)
            return EXIT_CONFIG
        return run_command(args)
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
