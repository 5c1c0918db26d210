"""Heat strip of one report column over the swept parameter."""

import argparse
import os
import sys


def main(argv=None) -> int:
    os.environ.setdefault("MPLBACKEND", "Agg")
    ap = argparse.ArgumentParser(
        prog="frontplot-sweep",
        description="Render a sweep.csv column as a one-row heatmap.",
    )
    ap.add_argument("sweep", help="sweep.csv from a sweep run")
    ap.add_argument("--out", required=True, help="output image path")
    ap.add_argument("--column", default="lambda2c")
    ap.add_argument("--cmap", default="coolwarm")
    ns = ap.parse_args(argv)

    from .readers import InputError
    from .recipe import FigureRecipe, render

    recipe = FigureRecipe(
        kind="sweep_heatmap", inputs=(ns.sweep,), cmap=ns.cmap, column=ns.column,
    )
    try:
        print(render(recipe, ns.out))
    except InputError as exc:
        print(f"frontplot-sweep: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
