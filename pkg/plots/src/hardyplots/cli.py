"""plot <kind> <csv> -o <png> — render a laboratory CSV into a figure."""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, PlotJob, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plot", description=__doc__)
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("csv", help="input CSV written by the hardylab CLI")
    parser.add_argument("-o", "--out", required=True, help="output image path")
    parser.add_argument("--title", default="")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    job = PlotJob(kind=args.kind, csv_path=args.csv, out_path=args.out,
                  title=args.title)
    try:
        render(job)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
