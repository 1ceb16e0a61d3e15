"""Rendering sweep results as parameter heatmaps.

Produces a small sweep CSV and renders three metric heatmaps with the
companion `sweepplots` package (install it via `pip install -e ./plots`).
The full-size figure grids come from `biasnet sweep --preset fig1-complete`
etc.; the same rendering commands apply to those CSVs unchanged.
"""

import sys

from biasnet import SweepConfig, TopologySpec, run_sweep, write_sweep_csv

try:
    from sweepplots import PlotSpec, render_heatmap
except ImportError:
    sys.exit("sweepplots is not installed; run: pip install -e ./plots")

config = SweepConfig(
    topology=TopologySpec(kind="complete", n=250),
    epsilon_values=(0.2, 0.4, 0.6, 0.8, 1.0),
    gamma_values=(0.0, 0.5, 1.0, 1.5, 2.0),
    replicates=3,
    max_iterations=5_000,
    master_seed=404,
)
csv_path = "/tmp/demo_heatmap_sweep.csv"
write_sweep_csv(run_sweep(config, parallelism=2), csv_path)
print(f"wrote {csv_path}")

for metric in ("mean_C", "mean_dist", "mean_iters"):
    out = f"/tmp/demo_heatmap_{metric}.png"
    render_heatmap(PlotSpec(csv_path=csv_path, metric=metric, out=out))
    print(f"rendered {out}")
