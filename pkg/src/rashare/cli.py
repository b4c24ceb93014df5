"""Command-line entry point.

Subcommands: run, sweep-power, sweep-n, pattern, validate.
Exit codes: 0 success, 1 config error, 2 solver failure, 3 validation failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .channel import DegenerateChannelError
from .harness import (
    ConfigError,
    RunConfig,
    gain_pattern,
    load_config,
    run_single,
    sweep_antennas,
    sweep_power,
    with_overrides,
    write_manifest,
    write_pattern_csv,
    write_rows_csv,
)
from .pointing import InfeasibleStartError
from .subproblem import InfeasibleAnchorError
from .validation import run_all

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2
EXIT_VALIDATION = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems are config errors, not solver failures
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _build_parser():
    parser = _Parser(prog="rashare", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run", "evaluate the configured schemes on a single scenario"),
        ("sweep-power", "sweep the transmit power grid"),
        ("sweep-n", "sweep the antenna count grid"),
        ("pattern", "probe the optimized array gain over elevation"),
        ("validate", "run the oracle suite and write a JSON report"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, default=None, help="JSON config path (defaults apply if omitted)")
        p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--schemes", type=str, default=None, help="comma-separated subset of ra,fixed,random,isotropic")
        if name == "validate":
            p.add_argument("--checks", type=str, default=None, help="comma-separated subset of checks to run")
    return parser


def _load(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    schemes = args.schemes.split(",") if args.schemes else None
    try:
        return with_overrides(cfg, seed=args.seed, schemes=schemes)
    except (ConfigError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out_dir = args.out
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    try:
        if args.command == "validate":
            names = set(args.checks.split(",")) if args.checks else None
            ok, report = run_all(seed=cfg.seed, names=names)
            path = out_dir / "validation.json"
            path.write_text(json.dumps(report, indent=2, default=str) + "\n")
            for name, entry in report.items():
                print(f"{'PASS' if entry['passed'] else 'FAIL'}  {name}")
            print(f"report: {path}")
            return EXIT_OK if ok else EXIT_VALIDATION

        if args.command == "pattern":
            entries = gain_pattern(cfg)
            path = out_dir / "pattern.csv"
            write_pattern_csv(entries, path)
            outputs = [path]
            timing = {"rows": len(entries)}
        else:
            runner = {"run": run_single, "sweep-power": sweep_power, "sweep-n": sweep_antennas}[args.command]
            rows, timing = runner(cfg)
            path = out_dir / f"{args.command.replace('-', '_')}.csv"
            write_rows_csv(rows, path)
            outputs = [path]
            for row in rows:
                print(row.csv_line())
        wall_ms = (time.perf_counter() - t0) * 1e3
        manifest = write_manifest(cfg, out_dir, args.command, outputs, timing, wall_ms)
        print(f"wrote {', '.join(str(p) for p in outputs)} and {manifest}")
        return EXIT_OK
    except (InfeasibleAnchorError, InfeasibleStartError, DegenerateChannelError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
