"""Command-line front end for batch link sweeps.

    rbslipt run --sweep <spec|preset> --out table.csv [--config file]
                [--format csv|json] [--jobs N] [--no-cache]
                [--cache-dir DIR] [--set key=value ...]
    rbslipt presets

Exit codes: 0 success (grid-point failures are flagged in the table and
counted on stderr), 2 invalid configuration, 3 output I/O failure.
"""

from __future__ import annotations

import argparse
import sys

from .cache import ModeCache, default_cache_dir
from .config import DEFAULTS, apply_overrides, load_config_file
from .errors import RBSliptError
from .sweep import PRESETS, emit_csv, emit_json, parse_sweep, run_sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rbslipt",
        description="Resonant-beam lightwave power/data link simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="evaluate a parameter sweep")
    run.add_argument("--config", help="key=value configuration file")
    run.add_argument(
        "--sweep",
        required=True,
        help="preset name (see 'rbslipt presets') or axis spec such as "
        "'theta_deg=0:15:16;L=3'",
    )
    run.add_argument("--out", required=True, help="output table path")
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("--jobs", type=int, default=1, help="parallel grid workers")
    run.add_argument("--no-cache", action="store_true", help="disable the mode cache")
    run.add_argument(
        "--cache-dir",
        help="mode cache directory (default: $RBSLIPT_CACHE_DIR or ./.rbslipt_cache)",
    )
    run.add_argument(
        "--set",
        action="append",
        metavar="KEY=VALUE",
        dest="overrides",
        help="override a configuration key (repeatable)",
    )

    sub.add_parser("presets", help="list the named figure-regeneration sweeps")
    return parser


def _cmd_presets() -> int:
    width = max(len(name) for name in PRESETS)
    for name, (description, spec) in PRESETS.items():
        axes = ", ".join(
            f"{axis}[{len(values)}]" for axis, values in spec.axes
        )
        print(f"{name:<{width}}  {axes:<28} {description}")
    return EXIT_OK


def _cmd_run(args) -> int:
    try:
        cfg = load_config_file(args.config) if args.config else dict(DEFAULTS)
        cfg = apply_overrides(cfg, args.overrides)
        if args.sweep in PRESETS:
            spec = PRESETS[args.sweep][1]
        else:
            spec = parse_sweep(args.sweep)
    except (RBSliptError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    cache = None
    if not args.no_cache:
        cache = ModeCache(args.cache_dir or default_cache_dir())

    try:
        rows = run_sweep(spec, cfg=cfg, jobs=args.jobs, cache=cache)
    except RBSliptError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.format == "csv":
            emit_csv(rows, args.out)
        else:
            emit_json(rows, args.out)
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_IO

    failures = sum(1 for row in rows if row.status != "ok")
    if failures:
        print(f"warning: {failures} of {len(rows)} grid points flagged", file=sys.stderr)
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "presets":
        return _cmd_presets()
    return _cmd_run(args)


if __name__ == "__main__":
    sys.exit(main())
