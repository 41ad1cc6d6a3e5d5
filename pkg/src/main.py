#!/usr/bin/env python3
"""
lp-lab: main entry point.

Orchestrates one run:
    1. Parse flags, merge them over the config file and LP_LAB_SEED
    2. Build the command's plan (all validation happens here)
    3. Execute, then hand the report to the writers

Exit codes: 0 success, 2 validation or output error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from src import debug
from src.commands import COMMANDS, HELP, build_plan
from src.config import RunConfig
from src.errors import NumericalFailure, ValidationError
from src.writers import build_writers, write_all

log = logging.getLogger("lp-lab")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


# ---------------------------------------------------------------------------
# Logging
# ---------------------------------------------------------------------------
def configure_logging(verbose: bool = False, quiet: bool = False):
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s [%(levelname)s] %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )


# ---------------------------------------------------------------------------
# Flags
# ---------------------------------------------------------------------------
def _list_of(kind):
    def parse(text: str):
        try:
            return [kind(item) for item in text.split(",") if item.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected a comma-separated list, got {text!r}")
    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lp-lab",
        description="Lacunary Littlewood-Paley square functions on the torus.",
        epilog="commands:\n" + "\n".join(f"  {name:18s} {HELP[name]}" for name in COMMANDS),
        formatter_class=argparse.RawDescriptionHelpFormatter,
        allow_abbrev=False,
    )
    parser.add_argument("command", choices=list(COMMANDS), metavar="command")
    parser.add_argument("--config", type=Path, help="JSON config file; flags override its keys")

    seq = parser.add_argument_group("sequence")
    seq.add_argument("--lambda", dest="lam", type=float)
    seq.add_argument("--count", type=int)
    seq.add_argument("--seq-file", dest="seq_file")

    grids = parser.add_argument_group("parameters")
    grids.add_argument("--lambdas", type=_list_of(float))
    grids.add_argument("--sigmas", type=_list_of(int))
    grids.add_argument("--ps", type=_list_of(float))
    grids.add_argument("--Ns", type=_list_of(int))
    grids.add_argument("--N", type=int)
    grids.add_argument("--M", type=int)
    grids.add_argument("--N-2d", dest="N_2d", type=int)
    grids.add_argument("--fit-lambda", dest="fit_lambda", type=float)
    grids.add_argument("--p", type=float)
    grids.add_argument("--input", help="fN:n, fM:n, fejer:n, dvp:n, random:deg[:seed], dirichlet:lo:hi")
    grids.add_argument("--width", type=int)

    run = parser.add_argument_group("run")
    run.add_argument("--trials", type=int)
    run.add_argument("--draws", type=int)
    run.add_argument("--oversampling", type=int)
    run.add_argument("--seed", dest="base_seed", type=int)
    run.add_argument("--jobs", type=int, help="worker threads (0: logical cores)")
    run.add_argument("--outdir")
    for flag in ("--plot", "--dry-run", "--pichorides", "--two-d"):
        run.add_argument(flag, action="store_const", const=True, default=None)
    run.add_argument("-v", "--verbose", action="store_true")
    run.add_argument("-q", "--quiet", action="store_true")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    """Config file < LP_LAB_SEED < flags."""
    config = RunConfig.from_file(args.config) if args.config else RunConfig()
    config = config.with_env()
    overrides = {
        name: getattr(args, name)
        for name in RunConfig.field_names()
        if hasattr(args, name)
    }
    config = config.merged(overrides)
    config.validate()
    return config


# ---------------------------------------------------------------------------
# Main
# ---------------------------------------------------------------------------
def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse has printed usage; 2 for bad flags, 0 for --help
        return e.code if isinstance(e.code, int) else EXIT_VALIDATION

    configure_logging(args.verbose, args.quiet)

    try:
        config = load_config(args)
        plan = build_plan(config)
    except ValidationError as e:
        log.error("%s", e)
        return EXIT_VALIDATION

    if config.dry_run:
        for i, task in enumerate(plan.tasks, 1):
            print(f"{i:3d}. {task}")
        log.info("Dry run: %d task(s) validated, nothing computed", len(plan.tasks))
        return EXIT_OK

    debug_dir = config.outdir_path / "debug"
    try:
        report = plan.execute()
    except ValidationError as e:
        log.error("%s", e)
        return EXIT_VALIDATION
    except NumericalFailure as e:
        log.error("Numerical failure: %s", e)
        debug.capture(config.command, str(e), debug_dir, config.to_dict(), e.details)
        return EXIT_NUMERICAL

    if report.stdout is not None:
        print(json.dumps(report.stdout, indent=2))
        return EXIT_OK

    failures = write_all(build_writers(config), report)
    if failures:
        log.error("Could not write artifacts to %s", config.outdir)
        return EXIT_VALIDATION

    if report.failed_checks:
        log.error("Failed checks: %s", ", ".join(report.failed_checks))
        debug.capture(
            config.command,
            f"failed checks: {', '.join(report.failed_checks)}",
            debug_dir,
            config.to_dict(),
            {"summary": report.summary},
        )
        return EXIT_NUMERICAL

    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
