"""plotkit command line: decay and ratio figures from diagnostics CSVs."""

import argparse
import sys

from . import __version__
from .plots import PlotError, PlotSpec, decay_plot, ratio_plot


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="plotkit", description="static figures from decay diagnostics CSVs"
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decay", help="log-log decay/growth curves with fitted slopes")
    p.add_argument("--csv", required=True)
    p.add_argument("--cols", required=True, help="comma-separated column names")
    p.add_argument("--targets", default=None, help="targets.csv for guide slopes")
    p.add_argument("--alpha", type=float, default=None, help="row selector in targets.csv")
    p.add_argument("--out", required=True, help="png or svg path")
    p.add_argument("--title", default=None)

    p = sub.add_parser("ratio", help="far-field ratio against radius")
    p.add_argument("--csv", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--title", default=None)

    args = parser.parse_args(argv)
    try:
        if args.command == "decay":
            spec = PlotSpec(
                csv_path=args.csv,
                columns=tuple(c.strip() for c in args.cols.split(",") if c.strip()),
                out_path=args.out,
                targets_path=args.targets,
                alpha=args.alpha,
                title=args.title,
            )
            result = decay_plot(spec)
            for col, slope in result.slopes.items():
                print(f"{col}: fitted slope {slope:.9f}")
        else:
            spec = PlotSpec(
                csv_path=args.csv, columns=(), out_path=args.out, title=args.title
            )
            ratio_plot(spec)
        print(f"figure -> {args.out}")
        return 0
    except (PlotError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
