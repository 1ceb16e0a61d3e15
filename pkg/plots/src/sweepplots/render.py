"""Grid heatmaps from sweep CSV tables.

The input is the flat sweep table (header row, one record per grid cell).
A plot takes one metric column over a complete x/y grid; incomplete grids
are an error that names every absent (x, y) combination.  Color scales are
pinned per metric family so panels from different sweeps are comparable:
cluster counts on a log scale 1-80, distances 0-0.2, iteration counts
0-1e5.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import LogNorm, Normalize

__all__ = ["PlotSpec", "GridError", "load_grid", "render_heatmap", "main"]

# fixed scale bounds per metric family, so side-by-side panels share colors
METRIC_SCALES = {
    "mean_C": (1.0, 80.0, "log"),
    "std_C": (0.0, 20.0, "linear"),
    "mean_n_clusters": (1.0, 80.0, "log"),
    "mean_dist": (0.0, 0.2, "linear"),
    "std_dist": (0.0, 0.1, "linear"),
    "mean_iters": (0.0, 1e5, "linear"),
    "converged_frac": (0.0, 1.0, "linear"),
}


class GridError(ValueError):
    """The CSV does not contain a complete, well-formed x/y grid."""


@dataclass(frozen=True)
class PlotSpec:
    csv_path: str
    metric: str
    x: str = "gamma"
    y: str = "epsilon"
    out: str = "heatmap.png"
    vmin: float | None = None
    vmax: float | None = None


def _read_rows(path) -> list[dict[str, str]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise GridError(f"cannot read {path}: {exc}") from exc
    lines = text.strip().splitlines()
    if not lines:
        raise GridError(f"{path}: empty file")
    reader = csv.reader(lines)
    header = next(reader)
    rows = []
    for lineno, cells in enumerate(reader, start=2):
        if len(cells) != len(header):
            raise GridError(f"{path}: line {lineno}: expected {len(header)} cells, "
                            f"got {len(cells)}")
        rows.append(dict(zip(header, cells)))
    if not rows:
        raise GridError(f"{path}: no data rows")
    return rows


def _column(rows, name, path, numeric=True):
    if name not in rows[0]:
        raise GridError(f"{path}: no column named {name!r}; "
                        f"available: {', '.join(rows[0])}")
    values = []
    for lineno, row in enumerate(rows, start=2):
        cell = row[name]
        if not numeric:
            values.append(cell)
            continue
        try:
            values.append(float(cell))
        except ValueError as exc:
            raise GridError(f"{path}: line {lineno}: column {name!r}: "
                            f"not a number: {cell!r}") from exc
    return values


def load_grid(spec: PlotSpec):
    """The (x values, y values, metric matrix) of a complete grid.

    The matrix has one row per y value (ascending) and one column per x
    value (ascending).  Raises GridError listing every missing (x, y)
    combination when the grid is incomplete.
    """
    rows = _read_rows(spec.csv_path)
    xs = _column(rows, spec.x, spec.csv_path)
    ys = _column(rows, spec.y, spec.csv_path)
    zs = _column(rows, spec.metric, spec.csv_path)
    x_values = sorted(set(xs))
    y_values = sorted(set(ys))
    cells = {}
    for x, y, z in zip(xs, ys, zs):
        if (x, y) in cells:
            raise GridError(f"{spec.csv_path}: duplicate grid cell "
                            f"({spec.x}={x:g}, {spec.y}={y:g})")
        cells[(x, y)] = z
    missing = [(x, y) for y in y_values for x in x_values if (x, y) not in cells]
    if missing:
        holes = ", ".join(f"({spec.x}={x:g}, {spec.y}={y:g})" for x, y in missing)
        raise GridError(f"{spec.csv_path}: incomplete grid, missing cells: {holes}")
    matrix = np.array([[cells[(x, y)] for x in x_values] for y in y_values])
    return x_values, y_values, matrix


def render_heatmap(spec: PlotSpec) -> str:
    """Render the grid to an image file; returns the output path.

    Styling is fixed and carries no timestamps, so re-rendering an identical
    CSV yields identical bytes.
    """
    x_values, y_values, matrix = load_grid(spec)
    lo, hi, scale = METRIC_SCALES.get(spec.metric, (None, None, "linear"))
    vmin = spec.vmin if spec.vmin is not None else (lo if lo is not None else float(matrix.min()))
    vmax = spec.vmax if spec.vmax is not None else (hi if hi is not None else float(matrix.max()))
    if scale == "log":
        norm = LogNorm(vmin=max(vmin, 1e-9), vmax=max(vmax, 1e-9))
    else:
        norm = Normalize(vmin=vmin, vmax=vmax if vmax > vmin else vmin + 1.0)

    fig, ax = plt.subplots(figsize=(1.2 + 0.55 * len(x_values), 1.0 + 0.5 * len(y_values)))
    im = ax.imshow(matrix, origin="lower", aspect="auto", cmap="viridis", norm=norm)
    ax.set_xticks(range(len(x_values)), [f"{v:g}" for v in x_values])
    ax.set_yticks(range(len(y_values)), [f"{v:g}" for v in y_values])
    ax.set_xlabel(spec.x)
    ax.set_ylabel(spec.y)
    ax.set_title(spec.metric)
    fig.colorbar(im, ax=ax, label=spec.metric)
    fig.tight_layout()
    fig.savefig(spec.out, dpi=120, metadata={"Software": "sweepplots"})
    plt.close(fig)
    return spec.out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sweepplots",
        description="Render a sweep CSV column as an x/y parameter heatmap.",
    )
    parser.add_argument("--csv", required=True, help="sweep CSV path")
    parser.add_argument("--metric", required=True,
                        help="metric column (e.g. mean_C, mean_dist, mean_iters)")
    parser.add_argument("--x", default="gamma", help="x-axis column (default gamma)")
    parser.add_argument("--y", default="epsilon", help="y-axis column (default epsilon)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--vmin", type=float, default=None, help="color scale lower bound")
    parser.add_argument("--vmax", type=float, default=None, help="color scale upper bound")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    spec = PlotSpec(csv_path=args.csv, metric=args.metric, x=args.x, y=args.y,
                    out=args.out, vmin=args.vmin, vmax=args.vmax)
    try:
        out = render_heatmap(spec)
    except GridError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
