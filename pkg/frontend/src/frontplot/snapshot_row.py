"""Panel row of field snapshots from FLB1 files, one panel per time."""

import argparse
import os
import sys


def main(argv=None) -> int:
    os.environ.setdefault("MPLBACKEND", "Agg")
    ap = argparse.ArgumentParser(
        prog="frontplot-snapshots",
        description="Render a 1xN row of U or V field snapshots from FLB1 files.",
    )
    ap.add_argument("snapshots", nargs="+", help="FLB1 files, left to right")
    ap.add_argument("--out", required=True, help="output image path")
    ap.add_argument("--field", choices=("u", "v"), default="u")
    ap.add_argument("--cmap", default="viridis")
    ns = ap.parse_args(argv)

    from .readers import InputError
    from .recipe import FigureRecipe, render

    recipe = FigureRecipe(
        kind="field_snapshot_row", inputs=tuple(ns.snapshots),
        cmap=ns.cmap, field=ns.field,
    )
    try:
        print(render(recipe, ns.out))
    except InputError as exc:
        print(f"frontplot-snapshots: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
