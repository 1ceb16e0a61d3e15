"""Observables of an opinion vector: cluster structure, dispersion, convergence."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import edges_settled

__all__ = [
    "ClusterPartition",
    "detect_clusters",
    "participation_ratio",
    "avg_pairwise_distance",
    "dispersion",
    "is_converged",
]

DEFAULT_CLUSTER_TOL = 0.01


@dataclass(frozen=True)
class ClusterPartition:
    """Opinion clusters ordered by ascending mean opinion.

    ``clusters`` holds the member ids of each cluster; ``sizes`` the
    fractional sizes, which sum to 1.
    """

    clusters: list[np.ndarray]
    sizes: np.ndarray

    @property
    def n_clusters(self) -> int:
        return len(self.clusters)


def detect_clusters(opinions, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> ClusterPartition:
    """Split sorted opinions at every gap strictly larger than cluster_tol.

    Each maximal run of consecutive sorted values with gaps <= cluster_tol
    forms one cluster; equivalent to connected components of the "distance at
    most cluster_tol" relation on the line.
    """
    if cluster_tol <= 0:
        raise ValueError(f"cluster tolerance must be positive, got {cluster_tol}")
    x = np.asarray(opinions, dtype=np.float64)
    if x.size == 0:
        raise ValueError("cannot cluster an empty opinion vector")
    order = np.argsort(x, kind="stable")
    s = x[order]
    cut_after = np.flatnonzero(np.diff(s) > cluster_tol)
    starts = np.concatenate(([0], cut_after + 1))
    ends = np.concatenate((cut_after + 1, [x.size]))
    clusters = [order[a:b] for a, b in zip(starts, ends)]
    sizes = (ends - starts) / x.size
    return ClusterPartition(clusters=clusters, sizes=sizes)


def participation_ratio(partition: ClusterPartition) -> float:
    """Effective number of equally sized clusters: (sum c_i)^2 / sum c_i^2.

    Scale-invariant, so fractional sizes and raw counts give the same value;
    ranges from 1 (one dominant cluster) to the cluster count m (all equal).
    """
    c = np.asarray(partition.sizes, dtype=np.float64)
    if c.size == 0:
        raise ValueError("empty partition")
    return float(c.sum() ** 2 / np.sum(c ** 2))


def avg_pairwise_distance(opinions) -> float:
    """Mean |x_i - x_j| over all ordered pairs (i, j), diagonal included.

    Computed in O(n log n): each gap g between consecutive sorted values is
    straddled by t * (n - t) unordered pairs, so the ordered-pair sum is
    2 * sum_t g_t * t * (n - t).  Identical opinions give exactly 0.
    """
    x = np.asarray(opinions, dtype=np.float64)
    n = x.size
    if n == 0:
        raise ValueError("empty opinion vector")
    if n == 1:
        return 0.0
    gaps = np.diff(np.sort(x))
    t = np.arange(1, n)
    return float(2.0 * np.dot(gaps, t * (n - t)) / (n * n))


def dispersion(opinions) -> float:
    """Opinion dispersion on the reporting scale used by traces and sweep
    tables: the distance sum over unordered agent pairs divided by n^2,
    i.e. half of :func:`avg_pairwise_distance`.

    Full consensus gives 0; a population spread uniformly over [0, 1]
    approaches 1/6.
    """
    return avg_pairwise_distance(opinions) / 2.0


def is_converged(opinions, g, epsilon: float, conv_delta: float = 1e-6) -> bool:
    """True iff no edge can still produce a meaningful interaction: every
    adjacent pair is either farther apart than epsilon or closer than
    conv_delta (so any update would move opinions by less than mu*conv_delta)."""
    if conv_delta <= 0:
        raise ValueError(f"convergence tolerance must be positive, got {conv_delta}")
    x = np.ascontiguousarray(opinions, dtype=np.float64)
    if g.n_edges == 0:
        return True
    eu = np.ascontiguousarray(g.edges[:, 0], dtype=np.int64)
    ev = np.ascontiguousarray(g.edges[:, 1], dtype=np.int64)
    return bool(edges_settled(x, eu, ev, epsilon, conv_delta))
