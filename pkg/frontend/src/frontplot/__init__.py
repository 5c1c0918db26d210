"""Plotting companion for frontlab output files.

Reads the documented artifact formats (FLB1 snapshots, spectral curve
CSV + metadata, sweep CSV) and renders figures from them. Pure consumer:
nothing here computes, it only draws what the files already contain.
"""

from .readers import InputError, read_curve, read_meta, read_snapshot, read_sweep
from .recipe import KINDS, FigureRecipe, render

__version__ = "0.1.0"

__all__ = [
    "FigureRecipe",
    "InputError",
    "KINDS",
    "read_curve",
    "read_meta",
    "read_snapshot",
    "read_sweep",
    "render",
    "__version__",
]
