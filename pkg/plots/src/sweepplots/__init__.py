"""Heatmaps from opinion-dynamics sweep CSV tables.

Consumes only the flat sweep CSV format (one row per grid cell); renders one
metric column over an x/y parameter grid with a fixed, timestamp-free style
so identical inputs give identical image bytes.
"""

from .render import GridError, PlotSpec, load_grid, render_heatmap

__version__ = "0.1.0"
__all__ = ["PlotSpec", "GridError", "load_grid", "render_heatmap"]
