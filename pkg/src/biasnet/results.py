"""Stable on-disk formats for run and sweep outputs.

Single runs persist as versioned JSON (nested trace included); sweeps persist
as flat CSV with one row per grid point, floats printed with 6 significant
digits, UTF-8 and LF line endings.  Both formats are frozen: changing a
column or key is a format break.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

__all__ = [
    "SweepRowRecord",
    "CSV_COLUMNS",
    "write_sweep_csv",
    "read_sweep_csv",
    "write_run_json",
    "read_run_json",
]

RUN_JSON_FORMAT = 1


@dataclass(frozen=True)
class SweepRowRecord:
    """One aggregated grid point of a parameter sweep."""

    topology: str
    epsilon: float
    gamma: float
    mu: float
    mu_lfr: float | None
    init: str
    replicates: int
    failures: int
    mean_C: float
    std_C: float
    mean_n_clusters: float
    mean_dist: float
    std_dist: float
    mean_iters: float
    converged_frac: float


CSV_COLUMNS = tuple(f.name for f in fields(SweepRowRecord))

_INT_COLUMNS = {"replicates", "failures"}
_STR_COLUMNS = {"topology", "init"}


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".6g")


def write_sweep_csv(table, path) -> None:
    """Header plus one record per grid point, in grid order."""
    rows = getattr(table, "rows", table)
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(_fmt(getattr(row, col)) for col in CSV_COLUMNS))
    try:
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OSError(f"cannot write sweep CSV to {path}: {exc}") from exc


def read_sweep_csv(path) -> list[SweepRowRecord]:
    """Inverse of :func:`write_sweep_csv`."""
    lines = Path(path).read_text(encoding="utf-8").strip().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty sweep CSV")
    header = tuple(lines[0].split(","))
    if header != CSV_COLUMNS:
        raise ValueError(f"{path}: unexpected CSV header {header}")
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(CSV_COLUMNS):
            raise ValueError(f"{path}:{lineno}: expected {len(CSV_COLUMNS)} cells, got {len(cells)}")
        kwargs = {}
        for col, cell in zip(CSV_COLUMNS, cells):
            if col in _STR_COLUMNS:
                kwargs[col] = cell
            elif col in _INT_COLUMNS:
                kwargs[col] = int(cell)
            elif cell == "":
                kwargs[col] = None
            else:
                kwargs[col] = float(cell)
        records.append(SweepRowRecord(**kwargs))
    return records


def write_run_json(result, params, seed, path, topology: str | None = None,
                   init: str | None = None) -> None:
    """Persist a RunResult with its parameters under schema version 1."""
    from .metrics import detect_clusters, dispersion, participation_ratio

    partition = detect_clusters(result.final_opinions)
    doc = {
        "format": RUN_JSON_FORMAT,
        "seed": int(seed),
        "topology": topology,
        "init": init,
        "params": {
            "epsilon": params.epsilon,
            "gamma": params.gamma,
            "mu": params.mu,
            "d_eps": params.d_eps,
            "max_iterations": params.max_iterations,
            "check_interval": params.check_interval,
            "conv_delta": params.conv_delta,
        },
        "converged": bool(result.converged),
        "iterations_used": int(result.iterations_used),
        "summary": {
            "C": participation_ratio(partition),
            "n_clusters": partition.n_clusters,
            "dispersion": dispersion(result.final_opinions),
        },
        "final_opinions": [float(v) for v in result.final_opinions],
        "trace": [[int(it), float(c), float(d)] for it, c, d in result.trace],
    }
    try:
        Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write run JSON to {path}: {exc}") from exc


def read_run_json(path) -> dict:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != RUN_JSON_FORMAT:
        raise ValueError(f"{path}: unsupported run JSON format {doc.get('format')!r}")
    return doc
