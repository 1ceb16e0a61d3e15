"""Network topologies used by the opinion model.

All generators return an immutable :class:`Graph` (CSR adjacency plus a flat
edge table) and are pure functions of their arguments and the seed, so graphs
can be rebuilt bit-identically by any worker process.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "Graph",
    "DegreeStats",
    "GenerationInfeasibleError",
    "GenerationFailedError",
    "generate_complete",
    "generate_er",
    "generate_ba",
    "generate_lfr",
    "degree_stats",
    "write_edge_list",
    "read_edge_list",
]


class GenerationInfeasibleError(ValueError):
    """The requested parameters admit no valid graph (e.g. community sizes cannot partition n)."""


class GenerationFailedError(RuntimeError):
    """Randomized construction did not produce a valid graph within its retry budget."""


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph with optional per-node community labels.

    Nodes are 0..n-1.  ``edges`` holds each undirected edge once as (u, v)
    with u < v; ``offsets``/``neighbors`` form the CSR adjacency with both
    directions present.  Arrays are read-only after construction.
    """

    n: int
    edges: np.ndarray       # (m, 2) int32, u < v
    offsets: np.ndarray     # (n + 1,) int64
    neighbors: np.ndarray   # (2m,) int32
    community: np.ndarray | None = None  # (n,) int32

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def neighbors_of(self, i: int) -> np.ndarray:
        return self.neighbors[self.offsets[i]:self.offsets[i + 1]]

    @property
    def n_communities(self) -> int:
        if self.community is None:
            return 0
        return int(self.community.max()) + 1 if self.n else 0

    @classmethod
    def from_edges(cls, n: int, edges, community=None) -> "Graph":
        """Build a Graph from an iterable of (u, v) pairs, validating simplicity."""
        if n < 1:
            raise ValueError(f"node count must be positive, got {n}")
        edge_arr = np.asarray(sorted({(min(u, v), max(u, v)) for u, v in edges}), dtype=np.int32)
        if edge_arr.size == 0:
            edge_arr = np.empty((0, 2), dtype=np.int32)
        else:
            if edge_arr.min() < 0 or edge_arr.max() >= n:
                raise ValueError("edge endpoint out of range")
            if np.any(edge_arr[:, 0] == edge_arr[:, 1]):
                raise ValueError("self-loops are not allowed")
        comm_arr = None
        if community is not None:
            comm_arr = np.asarray(community, dtype=np.int32)
            if comm_arr.shape != (n,):
                raise ValueError("community labels must cover every node exactly once")
        counts = np.zeros(n, dtype=np.int64)
        for u, v in edge_arr:
            counts[u] += 1
            counts[v] += 1
        offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=offsets[1:])
        neighbors = np.empty(offsets[-1], dtype=np.int32)
        fill = offsets[:-1].copy()
        for u, v in edge_arr:
            neighbors[fill[u]] = v
            fill[u] += 1
            neighbors[fill[v]] = u
            fill[v] += 1
        for arr in (edge_arr, offsets, neighbors):
            arr.setflags(write=False)
        if comm_arr is not None:
            comm_arr.setflags(write=False)
        return cls(n=n, edges=edge_arr, offsets=offsets, neighbors=neighbors, community=comm_arr)


@dataclass(frozen=True)
class DegreeStats:
    avg_degree: float
    min_degree: int
    max_degree: int
    n_components: int


def generate_complete(n: int) -> Graph:
    """Complete graph on n >= 2 nodes: every distinct pair connected."""
    if n < 2:
        raise ValueError(f"complete graph needs n >= 2, got {n}")
    iu, ju = np.triu_indices(n, k=1)
    return Graph.from_edges(n, zip(iu.tolist(), ju.tolist()))


def generate_er(n: int, p: float, seed) -> Graph:
    """Erdos-Renyi G(n, p): each of the n(n-1)/2 pairs kept independently with probability p.

    Pairs are visited in lexicographic (i, j) order with one uniform draw each,
    so the edge set is a pure function of the seed.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must be in [0, 1], got {p}")
    if n < 1:
        raise ValueError(f"node count must be positive, got {n}")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(len(iu)) < p
    return Graph.from_edges(n, zip(iu[keep].tolist(), ju[keep].tolist()))


def generate_ba(n: int, k: int, seed) -> Graph:
    """Barabasi-Albert preferential attachment.

    Starts from a complete graph on k nodes; each arriving node attaches k
    edges to distinct existing nodes with probability proportional to their
    current degree.
    """
    if k < 2 or k >= n:
        raise ValueError(f"attachment count must satisfy 2 <= k < n, got k={k}, n={n}")
    rng = np.random.default_rng(seed)
    edges = [(u, v) for u in range(k) for v in range(u + 1, k)]
    # one entry per incident edge end; uniform picks from it are degree-proportional
    repeated = [u for u, v in edges for u in (u, v)]
    for source in range(k, n):
        targets: set[int] = set()
        while len(targets) < k:
            targets.add(repeated[rng.integers(0, len(repeated))])
        for t in targets:
            edges.append((t, source))
            repeated.append(t)
        repeated.extend([source] * k)
    return Graph.from_edges(n, edges)


def degree_stats(g: Graph) -> DegreeStats:
    """Exact degree summary plus the number of connected components (BFS)."""
    degs = g.degrees
    seen = np.zeros(g.n, dtype=bool)
    n_components = 0
    for start in range(g.n):
        if seen[start]:
            continue
        n_components += 1
        stack = [start]
        seen[start] = True
        while stack:
            u = stack.pop()
            for v in g.neighbors_of(u):
                if not seen[v]:
                    seen[v] = True
                    stack.append(int(v))
    return DegreeStats(
        avg_degree=2.0 * g.n_edges / g.n,
        min_degree=int(degs.min()) if g.n else 0,
        max_degree=int(degs.max()) if g.n else 0,
        n_components=n_components,
    )


# --------------------------------------------------------------------------
# LFR benchmark construction
# --------------------------------------------------------------------------

_REWIRE_SWEEPS = 100
_RESAMPLE_BUDGET = 100
_BUILD_ATTEMPTS = 10


def _truncated_powerlaw_pmf(exponent: float, lo: int, hi: int) -> np.ndarray:
    ks = np.arange(lo, hi + 1, dtype=np.float64)
    pmf = ks ** (-exponent)
    return pmf / pmf.sum()


def _degree_sequence(n: int, tau1: float, avg_deg: float, rng) -> np.ndarray:
    """Sample integer degrees from a truncated power law with mean close to avg_deg.

    The lower cutoff is chosen so the distribution mean best matches avg_deg
    (upper cutoff fixed at n // 10); sampling retries until the realized mean
    is within 5% of the target.
    """
    k_max = max(2, n // 10)
    best_lo, best_err = 1, math.inf
    for lo in range(1, k_max + 1):
        pmf = _truncated_powerlaw_pmf(tau1, lo, k_max)
        mean = float(np.arange(lo, k_max + 1) @ pmf)
        if abs(mean - avg_deg) < best_err:
            best_lo, best_err = lo, abs(mean - avg_deg)
    pmf = _truncated_powerlaw_pmf(tau1, best_lo, k_max)
    values = np.arange(best_lo, k_max + 1)
    for _ in range(_RESAMPLE_BUDGET):
        degrees = rng.choice(values, size=n, p=pmf)
        if abs(degrees.mean() - avg_deg) <= 0.05 * avg_deg:
            break
    else:
        raise GenerationFailedError(
            f"could not realize mean degree {avg_deg} within 5% "
            f"(power-law exponent {tau1}, support [{best_lo}, {k_max}])"
        )
    if degrees.sum() % 2 == 1:
        # stub matching needs an even stub count
        bump = int(rng.integers(0, n))
        degrees[bump] += 1 if degrees[bump] < k_max else -1
    return degrees.astype(np.int64)


def _largest_remainder_split(n: int, m: int) -> list[int]:
    base, extra = divmod(n, m)
    return [base + 1 if i < extra else base for i in range(m)]


def _community_sizes(n: int, tau2: float, min_comm: int, rng) -> list[int]:
    """Partition n nodes into community sizes >= min_comm.

    When only a handful of blocks fit (n // min_comm <= 8) the power law over
    sizes cannot express itself; the partition degenerates to an even
    largest-remainder split targeting a mean block size of 1.25 * min_comm,
    which keeps every block comfortably above the minimum.  Otherwise sizes
    are drawn greedily from the truncated power law.
    """
    max_blocks = n // min_comm
    if max_blocks <= 8:
        m = max(2, min(max_blocks, round(n / (1.25 * min_comm))))
        return _largest_remainder_split(n, m)
    hi = n - min_comm
    pmf = _truncated_powerlaw_pmf(tau2, min_comm, hi)
    values = np.arange(min_comm, hi + 1)
    sizes: list[int] = []
    remaining = n
    rejects = 0
    while remaining >= min_comm:
        if remaining < 2 * min_comm:
            sizes.append(remaining)
            remaining = 0
            break
        s = int(rng.choice(values, p=pmf))
        if s <= remaining - min_comm or s == remaining:
            sizes.append(min(s, remaining))
            remaining -= min(s, remaining)
            rejects = 0
        else:
            rejects += 1
            if rejects > _RESAMPLE_BUDGET:
                sizes.append(remaining)
                remaining = 0
    return sizes


def _match_stubs(stubs: np.ndarray, rng, same_forbidden: np.ndarray | None,
                 existing: set[tuple[int, int]]) -> list[tuple[int, int]]:
    """Pair stubs into simple edges, repairing conflicts by local edge swaps.

    ``same_forbidden`` (community labels) forbids edges inside one community
    when given, which realizes the inter-community phase.  Raises
    GenerationFailedError if conflicts survive the sweep budget.
    """
    if len(stubs) == 0:
        return []
    stubs = stubs.copy()
    rng.shuffle(stubs)
    pairs = [(int(stubs[2 * i]), int(stubs[2 * i + 1])) for i in range(len(stubs) // 2)]

    def bad(u: int, v: int) -> bool:
        if u == v:
            return True
        key = (u, v) if u < v else (v, u)
        if key in existing:
            return True
        return same_forbidden is not None and same_forbidden[u] == same_forbidden[v]

    edge_set: set[tuple[int, int]] = set()
    conflicts: list[int] = []
    for idx, (u, v) in enumerate(pairs):
        key = (u, v) if u < v else (v, u)
        if bad(u, v) or key in edge_set:
            conflicts.append(idx)
        else:
            edge_set.add(key)

    for _ in range(_REWIRE_SWEEPS):
        if not conflicts:
            break
        still = []
        for idx in conflicts:
            u, v = pairs[idx]
            other = int(rng.integers(0, len(pairs)))
            if other == idx or other in still:
                still.append(idx)
                continue
            a, b = pairs[other]
            okey = (a, b) if a < b else (b, a)
            if okey not in edge_set:
                still.append(idx)
                continue
            # swap partners: (u, v), (a, b) -> (u, b), (a, v)
            k1 = (u, b) if u < b else (b, u)
            k2 = (a, v) if a < v else (v, a)
            if bad(u, b) or bad(a, v) or k1 in edge_set or k2 in edge_set or k1 == k2:
                still.append(idx)
                continue
            edge_set.discard(okey)
            edge_set.add(k1)
            edge_set.add(k2)
            pairs[idx] = (u, b)
            pairs[other] = (a, v)
        conflicts = still
    if conflicts:
        raise GenerationFailedError(
            f"stub matching left {len(conflicts)} unresolved conflicts "
            f"after {_REWIRE_SWEEPS} rewiring sweeps"
        )
    return sorted(edge_set)


def generate_lfr(n: int, tau1: float, tau2: float, mu_mix: float, avg_deg: float,
                 min_comm: int, seed) -> Graph:
    """LFR benchmark graph with planted communities.

    Power-law degrees (exponent tau1) scaled to mean avg_deg, community sizes
    from a power law (exponent tau2) with minimum size min_comm, and a per-node
    fraction mu_mix of edges leaving the node's community, realized by separate
    intra- and inter-community stub matching plus conflict rewiring.
    """
    if not 0.0 < mu_mix < 1.0:
        raise ValueError(f"mixing fraction must be in (0, 1), got {mu_mix}")
    if tau1 <= 1.0 or tau2 <= 1.0:
        raise ValueError("power-law exponents must exceed 1")
    if avg_deg <= 0:
        raise ValueError(f"average degree must be positive, got {avg_deg}")
    if min_comm < 1 or min_comm > n:
        raise ValueError(f"minimum community size must be in [1, n], got {min_comm}")
    if 2 * min_comm > n:
        raise GenerationInfeasibleError(
            f"cannot fit two communities of size >= {min_comm} into {n} nodes"
        )
    rng = np.random.default_rng(seed)
    degrees = _degree_sequence(n, tau1, avg_deg, rng)
    sizes = _community_sizes(n, tau2, min_comm, rng)

    last_error: GenerationFailedError | None = None
    for _attempt in range(_BUILD_ATTEMPTS):
        try:
            labels, all_edges = _assemble(n, degrees, sizes, mu_mix, rng)
            return Graph.from_edges(n, all_edges, community=labels)
        except GenerationFailedError as exc:
            last_error = exc
    raise GenerationFailedError(
        f"LFR assembly failed {_BUILD_ATTEMPTS} times; last error: {last_error}"
    )


def _assign_communities(n, degrees, sizes, mu_mix, rng):
    """Place nodes into communities respecting intra-degree feasibility:
    high intra-degree nodes go where the community is large enough to host
    all their internal edges."""
    intra_target = np.rint((1.0 - mu_mix) * degrees).astype(np.int64)
    labels = np.full(n, -1, dtype=np.int32)
    capacity = list(sizes)
    # descending intra degree, random order within ties
    order = np.lexsort((rng.permutation(n), -intra_target))
    for i in order:
        feasible = [c for c, cap in enumerate(capacity) if cap > 0 and sizes[c] - 1 >= intra_target[i]]
        if not feasible:
            feasible = [c for c, cap in enumerate(capacity) if cap > 0]
        c = int(feasible[rng.integers(0, len(feasible))])
        labels[i] = c
        capacity[c] -= 1
    intra = np.minimum(intra_target, np.array([sizes[c] - 1 for c in labels]))
    return labels, intra


def _assemble(n, degrees, sizes, mu_mix, rng):
    labels, intra = _assign_communities(n, degrees, sizes, mu_mix, rng)

    # per-community parity: shift one stub to the inter pool when odd
    for c in range(len(sizes)):
        members = np.flatnonzero(labels == c)
        if intra[members].sum() % 2 == 1:
            candidates = members[intra[members] > 0]
            pick = int(rng.choice(candidates)) if len(candidates) else int(rng.choice(members))
            if intra[pick] > 0:
                intra[pick] -= 1
            else:
                intra[pick] += 1
    inter = degrees - intra

    existing: set[tuple[int, int]] = set()
    all_edges: list[tuple[int, int]] = []
    for c in range(len(sizes)):
        members = np.flatnonzero(labels == c)
        stubs = np.repeat(members, intra[members])
        intra_edges = _match_stubs(stubs.astype(np.int64), rng, None, existing)
        existing.update(intra_edges)
        all_edges.extend(intra_edges)
    inter_stubs = np.repeat(np.arange(n), inter)
    if len(inter_stubs) % 2 == 1:
        # drop one stub from the best-endowed node; changes one degree by 1
        drop = int(np.argmax(inter))
        inter = inter.copy()
        inter[drop] -= 1
        inter_stubs = np.repeat(np.arange(n), inter)
    inter_edges = _match_stubs(inter_stubs.astype(np.int64), rng, labels, existing)
    all_edges.extend(inter_edges)
    return labels, all_edges


# --------------------------------------------------------------------------
# Edge-list serialization
# --------------------------------------------------------------------------

def write_edge_list(g: Graph, path, community_path=None) -> None:
    """Write "# n=<N>" header plus one "u v" line per edge; community labels
    go to a sidecar file as "node community" lines."""
    path = Path(path)
    lines = [f"# n={g.n}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    if community_path is not None:
        if g.community is None:
            raise ValueError("graph has no community labels to write")
        comm_lines = [f"{i} {c}" for i, c in enumerate(g.community)]
        Path(community_path).write_text("\n".join(comm_lines) + "\n", encoding="utf-8")


def read_edge_list(path, community_path=None) -> Graph:
    """Inverse of :func:`write_edge_list`."""
    text = Path(path).read_text(encoding="utf-8").strip().splitlines()
    if not text or not text[0].startswith("# n="):
        raise ValueError(f"{path}: missing '# n=<N>' header line")
    n = int(text[0].split("=", 1)[1])
    edges = []
    for line in text[1:]:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        u, v = line.split()
        edges.append((int(u), int(v)))
    community = None
    if community_path is not None:
        community = np.zeros(n, dtype=np.int32)
        for line in Path(community_path).read_text(encoding="utf-8").strip().splitlines():
            if not line.strip() or line.startswith("#"):
                continue
            node, comm = line.split()
            community[int(node)] = int(comm)
    return Graph.from_edges(n, edges, community=community)
