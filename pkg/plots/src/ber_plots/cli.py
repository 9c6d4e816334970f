"""Command line for the results-CSV figure renderer."""

from __future__ import annotations

import argparse
import sys

from .render import PlotSpec, ResultsFormatError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ber-plots",
        description="Render icqam results CSVs as log-scale error-rate figures",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure from one or more CSVs")
    p.add_argument("--in", dest="inputs", action="append", required=True,
                   metavar="CSV", help="input results CSV (repeatable)")
    p.add_argument("--out", required=True, help="output image (.svg or .png)")
    p.add_argument("--receivers", default=None,
                   help="comma-separated receiver filter, e.g. 1,2")
    p.add_argument("--schemes", default=None,
                   help="comma-separated scheme filter, e.g. qam-mapped,binary")
    p.add_argument("--title", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        receivers = (
            tuple(int(tok) for tok in args.receivers.split(","))
            if args.receivers
            else None
        )
        schemes = tuple(args.schemes.split(",")) if args.schemes else None
        spec = PlotSpec(
            inputs=tuple(args.inputs),
            output=args.out,
            title=args.title,
            schemes=schemes,
            receivers=receivers,
        )
        path = render(spec)
    except (ResultsFormatError, OSError, ValueError) as exc:
        print(f"ber-plots: error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
