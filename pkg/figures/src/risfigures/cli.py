"""Command line: render --kind <k> --in <csv> --out <png>."""

from __future__ import annotations

import argparse
import sys

from .render import RENDERERS, TableError


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="risdecoy-render",
        description="Render risdecoy CSV exports into PNG figures.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure")
    p.add_argument("--kind", required=True, choices=sorted(RENDERERS))
    p.add_argument("--in", dest="inputs", required=True, nargs="+",
                   help="input CSV table(s); all kinds take one table")
    p.add_argument("--out", required=True, help="output PNG path")
    p.add_argument("--field", default="ang", choices=("ang", "pos"),
                   help="peb_map only: angular or position PEB columns")
    args = parser.parse_args(argv)

    if len(args.inputs) != 1:
        print("error: each figure kind renders exactly one table",
              file=sys.stderr)
        return 2
    try:
        if args.kind == "peb_map":
            out = RENDERERS[args.kind](args.inputs[0], args.out, field=args.field)
        else:
            out = RENDERERS[args.kind](args.inputs[0], args.out)
    except TableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
