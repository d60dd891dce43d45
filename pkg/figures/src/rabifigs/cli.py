"""Command line: render one panel spec to an image file."""

from __future__ import annotations

import argparse
import sys

from .panels import PanelError, PanelSpec
from .render import render_panel


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="rabiwork-plot", description="Render a trajectory panel from CSV data"
    )
    parser.add_argument("--spec", required=True, help="panel spec JSON")
    parser.add_argument("--out", default=None, help="output image (png or svg)")
    parser.add_argument("--csv-root", default=".", help="directory holding the CSVs")
    args = parser.parse_args(argv)
    try:
        spec = PanelSpec.from_json(args.spec)
        _, path = render_panel(spec, csv_root=args.csv_root, out=args.out)
    except PanelError as exc:
        print(f"panel error: {exc}", file=sys.stderr)
        return 2
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
