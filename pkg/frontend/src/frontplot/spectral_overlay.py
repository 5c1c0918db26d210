"""Spectral-curve comparison: numerical eigenvalue curve (solid) against
the quadratic lambda2c * ell^2 from the metadata sidecar (dashed)."""

import argparse
import os
import sys


def main(argv=None) -> int:
    os.environ.setdefault("MPLBACKEND", "Agg")
    ap = argparse.ArgumentParser(
        prog="frontplot-spectrum",
        description="Overlay a curve.csv with the parabola from its sidecar.",
    )
    ap.add_argument("curve", help="curve.csv from a spectrum run")
    ap.add_argument("meta", help="curve_meta.txt sidecar")
    ap.add_argument("--out", required=True, help="output image path")
    ap.add_argument("--title", default=None)
    ns = ap.parse_args(argv)

    from .readers import InputError
    from .recipe import FigureRecipe, render

    recipe = FigureRecipe(
        kind="spectral_comparison", inputs=(ns.curve, ns.meta),
        labels=(ns.title,) if ns.title else (),
    )
    try:
        print(render(recipe, ns.out))
    except InputError as exc:
        print(f"frontplot-spectrum: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
