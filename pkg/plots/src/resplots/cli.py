"""Command-line figure renderer for sweep CSV output.

    resplots --input run.csv --figure sigma --exponent -3 --output fig1

writes fig1.png and fig1.svg.  Exit status: 0 on success, 2 on any
error (bad figure kind, missing columns, nothing to plot).
"""

from __future__ import annotations

import argparse
import sys

from .render import FIGURES, PlotSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resplots",
        description="log-log figures from sweep result CSV files")
    parser.add_argument("--input", required=True, help="sweep CSV path")
    parser.add_argument("--figure", required=True,
                        choices=sorted(FIGURES), help="figure kind")
    parser.add_argument("--exponent", required=True, type=float,
                        help="reference line exponent (e.g. -3 or 7)")
    parser.add_argument("--output", required=True,
                        help="output base path (suffix is replaced by "
                             ".png/.svg)")
    parser.add_argument("--title", default="", help="figure title")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = render(PlotSpec(input_csv=args.input, figure=args.figure,
                                 reference_exponent=args.exponent,
                                 output=args.output, title=args.title))
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"{args.figure}: {result['points']} points -> {result['png']} "
          f"and {result['svg']}")
    print(f"  fitted slope: {result['slope']:+.6f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
