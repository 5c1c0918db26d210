"""Figure recipes: a declarative (kind, inputs, styling) triple and the
renderer that turns one into an image file.

All science happens upstream; this module only arranges parsed data on
axes. Rendering uses whatever matplotlib backend is active (the CLI
scripts force Agg).
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .readers import InputError, read_curve, read_meta, read_snapshot, read_sweep

KINDS = ("field_snapshot_row", "spectral_comparison", "sweep_heatmap")


@dataclass(frozen=True)
class FigureRecipe:
    kind: str
    inputs: tuple = ()
    cmap: str = "viridis"
    labels: tuple = ()
    field: str = "u"          # snapshot rows: which field to draw
    column: str = "lambda2c"  # sweep heatmaps: which report column


def _check(recipe):
    if recipe.kind not in KINDS:
        raise InputError(f"unknown figure kind {recipe.kind!r}; have {KINDS}")
    if not recipe.inputs:
        raise InputError(f"{recipe.kind}: no input files given")
    for p in recipe.inputs:
        if not Path(p).is_file():
            raise InputError(f"{p}: input file does not exist")


def _snapshot_row(recipe, out):
    import matplotlib.pyplot as plt

    if recipe.field not in ("u", "v"):
        raise InputError(f"field must be 'u' or 'v', got {recipe.field!r}")
    snaps = [read_snapshot(p) for p in recipe.inputs]
    n = len(snaps)
    fig, axes = plt.subplots(1, n, figsize=(3.2 * n, 3.4), squeeze=False, sharey=True)
    vmin = min(s[3 if recipe.field == "u" else 4].min() for s in snaps)
    vmax = max(s[3 if recipe.field == "u" else 4].max() for s in snaps)
    for ax, (t, dx, dy, u, v) in zip(axes[0], snaps):
        grid = u if recipe.field == "u" else v
        ny, nx = grid.shape
        im = ax.imshow(
            grid, origin="lower", extent=(0.0, nx * dx, 0.0, ny * dy),
            cmap=recipe.cmap, vmin=vmin, vmax=vmax, aspect="auto",
        )
        ax.set_title(f"t = {t:g}")
        ax.set_xlabel("x")
    axes[0][0].set_ylabel("y")
    fig.colorbar(im, ax=list(axes[0]), shrink=0.85, label=recipe.field)
    fig.savefig(out, dpi=150)
    plt.close(fig)


def _spectral_comparison(recipe, out):
    import matplotlib.pyplot as plt

    if len(recipe.inputs) != 2:
        raise InputError("spectral_comparison needs exactly (curve.csv, curve_meta.txt)")
    curve = read_curve(recipe.inputs[0])
    meta = read_meta(recipe.inputs[1])
    if "lambda2c" not in meta:
        raise InputError(f"{recipe.inputs[1]}: sidecar is missing lambda2c")
    ell = curve[:, 0]
    fig, ax = plt.subplots(figsize=(5.2, 3.9))
    ax.plot(ell, curve[:, 1], "-", color="tab:blue", lw=1.6, label="numerical")
    dense = np.linspace(0.0, ell.max() if len(ell) else 1.0, 200)
    ax.plot(
        dense, meta["lambda2c"] * dense**2, "--", color="tab:red", lw=1.4,
        label=r"$\lambda_{2,c}\,\ell^2$",
    )
    ax.axhline(0.0, color="0.7", lw=0.6)
    ax.set_xlabel(r"$\ell$")
    ax.set_ylabel(r"$\mathrm{Re}\,\lambda_c(\ell)$")
    title = ", ".join(
        f"{k} = {meta[k]}" for k in ("model", "eps", "verdict") if k in meta)
    if recipe.labels:
        title = recipe.labels[0]
    ax.set_title(title, fontsize=9)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)


def _sweep_heatmap(recipe, out):
    import matplotlib.pyplot as plt

    pname, columns, rows = read_sweep(recipe.inputs[0])
    if recipe.column not in columns:
        raise InputError(f"{recipe.inputs[0]}: no column {recipe.column!r} in {columns}")
    values = np.array([r[pname] if r[pname] is not None else np.nan for r in rows])
    heat = np.array(
        [r[recipe.column] if isinstance(r[recipe.column], float) else np.nan for r in rows])
    fig, ax = plt.subplots(figsize=(max(4.0, 0.5 * len(rows) + 2.0), 2.2))
    if len(rows):
        im = ax.imshow(
            heat.reshape(1, -1), cmap=recipe.cmap, aspect="auto",
            extent=(-0.5, len(rows) - 0.5, -0.5, 0.5),
        )
        ax.set_xticks(range(len(rows)), [f"{v:g}" for v in values], fontsize=7)
        fig.colorbar(im, ax=ax, label=recipe.column)
    else:
        # degenerate sweep: keep the frame, no data and no legend
        ax.set_xticks([])
    ax.set_yticks([])
    ax.set_xlabel(pname)
    ax.set_title(recipe.labels[0] if recipe.labels else f"{recipe.column} over {pname}")
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)


_RENDERERS = {
    "field_snapshot_row": _snapshot_row,
    "spectral_comparison": _spectral_comparison,
    "sweep_heatmap": _sweep_heatmap,
}


def render(recipe: FigureRecipe, out) -> Path:
    """Render the recipe to `out`; returns the written path."""
    _check(recipe)
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    _RENDERERS[recipe.kind](recipe, out)
    return out
