"""``qpsr`` command line: run an experiment or validate a config file.

Exit codes: 0 success, 2 config error, 3 numerical guard tripped.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import NumericalGuardError
from .experiments import EXPERIMENTS, ConfigError, default_config, load_config, run, validate, write_outputs

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qpsr", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment and write its data")
    r.add_argument("--experiment", choices=EXPERIMENTS, help="defaults to the config's 'experiment' key")
    r.add_argument("--config", type=Path)
    r.add_argument("--seed", type=int)
    r.add_argument("--out", type=Path, help="output file (default: config output_path or <experiment>.<format>)")
    r.add_argument("--format", choices=("csv", "json"))
    r.add_argument("--workers", type=int, default=1)

    v = sub.add_parser("validate", help="check a config file without running it")
    v.add_argument("--config", type=Path, required=True)
    v.add_argument("--experiment", choices=EXPERIMENTS)
    return ap


def _resolve(args):
    if args.config is not None:
        cfg = load_config(args.config, args.experiment)
    elif args.experiment:
        cfg = default_config(args.experiment)
    else:
        raise ConfigError(["experiment: pass --experiment or --config"])
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "format", None):
        cfg.format = args.format
    return validate(cfg)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = _resolve(args)
        if args.command == "validate":
            print(f"ok: {cfg.experiment} config {cfg.hash()}")
            return EXIT_OK
        if args.workers < 1:
            raise ConfigError(["workers: must be >= 1"])
        record = run(cfg, workers=args.workers)
        out = args.out or Path(cfg.output_path or f"{cfg.experiment}.{cfg.format}")
        for path in write_outputs(record, cfg, out):
            print(path)
        return EXIT_OK
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalGuardError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
