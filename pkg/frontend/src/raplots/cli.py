"""Batch figure rendering: plot --kind {pattern,power,antennas} --in CSV --out PNG."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import KINDS, FigureSpec, RenderError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plot", description=__doc__)
    parser.add_argument("--kind", required=True, choices=KINDS, help="figure kind")
    parser.add_argument("--in", dest="input", required=True, type=Path, help="input CSV")
    parser.add_argument("--out", dest="output", required=True, type=Path, help="output image (PNG)")
    args = parser.parse_args(argv)
    try:
        render(FigureSpec(args.input, args.kind, args.output))
    except RenderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
