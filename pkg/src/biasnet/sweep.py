"""Deterministic parameter sweeps over (topology, epsilon, gamma, init) grids.

Each grid cell runs `replicates` independent simulations.  Seeds derive from
one master seed through a frozen 64-bit mixing function, so the whole sweep
is reproducible bit for bit and independent of worker count and execution
order.  Replicates share their topology seed across cells (paired design:
epsilon/gamma comparisons hold the graph fixed per replicate) unless
``independent_graphs`` is set.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np
import yaml

from .graphs import (
    GenerationFailedError,
    GenerationInfeasibleError,
    Graph,
    generate_ba,
    generate_complete,
    generate_er,
    generate_lfr,
)
from .metrics import detect_clusters, dispersion, participation_ratio
from .model import InitSpec, ModelParams, RunResult, run
from .results import SweepRowRecord

__all__ = [
    "TopologySpec",
    "SweepConfig",
    "AggregateTable",
    "RowStats",
    "derive_seed",
    "build_topology",
    "aggregate",
    "run_sweep",
    "preset",
    "preset_names",
    "load_config",
    "ConfigError",
    "WORKERS_ENV_VAR",
]

WORKERS_ENV_VAR = "BIASNET_WORKERS"

TOPOLOGY_KINDS = ("complete", "er", "ba", "lfr")


class ConfigError(ValueError):
    """A sweep configuration document is malformed."""


@dataclass(frozen=True)
class TopologySpec:
    """Which network to build per replicate.

    ``mu_lfr`` may be a single mixing fraction or a sequence; a sequence adds
    a grid dimension (used by the community-structure sweeps).
    """

    kind: str
    n: int = 250
    p: float | None = None            # er
    k: int | None = None              # ba
    tau1: float | None = None         # lfr degree exponent
    tau2: float | None = None         # lfr community-size exponent
    mu_lfr: float | tuple[float, ...] | None = None
    avg_deg: float | None = None      # lfr
    min_comm: int | None = None       # lfr

    def __post_init__(self):
        if self.kind not in TOPOLOGY_KINDS:
            raise ConfigError(f"unknown topology kind {self.kind!r}; expected one of {TOPOLOGY_KINDS}")
        required = {
            "complete": (),
            "er": ("p",),
            "ba": ("k",),
            "lfr": ("tau1", "tau2", "mu_lfr", "avg_deg", "min_comm"),
        }[self.kind]
        missing = [name for name in required if getattr(self, name) is None]
        if missing:
            raise ConfigError(f"topology {self.kind!r} requires parameters: {', '.join(missing)}")
        if isinstance(self.mu_lfr, (list, tuple)):
            object.__setattr__(self, "mu_lfr", tuple(float(v) for v in self.mu_lfr))

    @property
    def mu_lfr_values(self) -> tuple[float | None, ...]:
        if self.kind != "lfr":
            return (None,)
        if isinstance(self.mu_lfr, tuple):
            return self.mu_lfr
        return (float(self.mu_lfr),)


@dataclass(frozen=True)
class SweepConfig:
    topology: TopologySpec
    epsilon_values: tuple[float, ...] = (0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
    gamma_values: tuple[float, ...] = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0)
    mu: float = 0.5
    init: InitSpec = field(default_factory=InitSpec)
    replicates: int = 10
    master_seed: int = 20210
    max_iterations: int = 100_000
    d_eps: float = 1e-4
    check_interval: int = 100
    conv_delta: float = 1e-6
    independent_graphs: bool = False

    def __post_init__(self):
        if self.replicates < 1:
            raise ConfigError(f"replicates must be >= 1, got {self.replicates}")
        object.__setattr__(self, "epsilon_values", tuple(float(v) for v in self.epsilon_values))
        object.__setattr__(self, "gamma_values", tuple(float(v) for v in self.gamma_values))

    def cells(self) -> list[tuple[float, float, float | None]]:
        """Grid points in the documented lexicographic order
        (epsilon outermost, then gamma, then mu_lfr)."""
        return [
            (eps, gamma, mu_lfr)
            for eps in self.epsilon_values
            for gamma in self.gamma_values
            for mu_lfr in self.topology.mu_lfr_values
        ]

    def model_params(self, epsilon: float, gamma: float) -> ModelParams:
        return ModelParams(
            epsilon=epsilon, gamma=gamma, mu=self.mu, d_eps=self.d_eps,
            max_iterations=self.max_iterations, check_interval=self.check_interval,
            conv_delta=self.conv_delta,
        )


# --------------------------------------------------------------------------
# Seed derivation (frozen: changing this breaks reproducibility of outputs)
# --------------------------------------------------------------------------

_MASK64 = (1 << 64) - 1
# grid index reserved for topology seeds, which are shared across cells
TOPOLOGY_STREAM = _MASK64 >> 1


def _mix64(z: int) -> int:
    """SplitMix64 finalizer: bijective 64-bit avalanche."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, grid_index: int, replicate: int) -> int:
    """Stable mixing of (master seed, grid index, replicate) into a 64-bit seed.

    Distinct (grid_index, replicate) pairs under one master seed collide only
    with probability ~2^-64.  This mapping is part of the output format.
    """
    h = _mix64(master_seed & _MASK64)
    h = _mix64(h ^ (grid_index & _MASK64))
    h = _mix64(h ^ (replicate & _MASK64))
    return h


# --------------------------------------------------------------------------
# Execution
# --------------------------------------------------------------------------

def build_topology(topo: TopologySpec, mu_lfr: float | None, seed: int) -> Graph:
    if topo.kind == "complete":
        return generate_complete(topo.n)
    if topo.kind == "er":
        return generate_er(topo.n, topo.p, seed)
    if topo.kind == "ba":
        return generate_ba(topo.n, topo.k, seed)
    return generate_lfr(topo.n, topo.tau1, topo.tau2, mu_lfr, topo.avg_deg,
                        topo.min_comm, seed)


def _run_task(args) -> tuple[int, int, RunResult | None, str | None]:
    """One (cell, replicate) simulation; returns a failure message instead of
    raising for graph-generation failures so a sweep survives bad cells."""
    config, grid_index, replicate = args
    eps, gamma, mu_lfr = config.cells()[grid_index]
    topo_stream = grid_index if config.independent_graphs else TOPOLOGY_STREAM
    topo_seed = derive_seed(config.master_seed, topo_stream, replicate)
    try:
        graph = build_topology(config.topology, mu_lfr, topo_seed)
    except (GenerationFailedError, GenerationInfeasibleError) as exc:
        return grid_index, replicate, None, str(exc)
    run_seed = derive_seed(config.master_seed, grid_index, replicate)
    result = run(graph, config.init, config.model_params(eps, gamma), run_seed)
    return grid_index, replicate, result, None


@dataclass(frozen=True)
class RowStats:
    """Replicate statistics for one grid cell."""

    n: int
    mean_C: float
    std_C: float
    mean_n_clusters: float
    mean_dist: float
    std_dist: float
    mean_iters: float
    converged_frac: float


def _sample_std(values: np.ndarray) -> float:
    # single replicate has no spread estimate; report 0 rather than NaN
    return float(np.std(values, ddof=1)) if len(values) > 1 else 0.0


def aggregate(results: list[RunResult]) -> RowStats:
    """Sample mean and n-1 standard deviation of the final metrics, plus the
    fraction of converged runs."""
    if not results:
        raise ValueError("cannot aggregate an empty result list")
    Cs, ncls, dists, iters, convs = [], [], [], [], []
    for res in results:
        partition = detect_clusters(res.final_opinions)
        Cs.append(participation_ratio(partition))
        ncls.append(partition.n_clusters)
        dists.append(dispersion(res.final_opinions))
        iters.append(res.iterations_used)
        convs.append(res.converged)
    Cs, dists = np.asarray(Cs), np.asarray(dists)
    return RowStats(
        n=len(results),
        mean_C=float(np.mean(Cs)),
        std_C=_sample_std(Cs),
        mean_n_clusters=float(np.mean(ncls)),
        mean_dist=float(np.mean(dists)),
        std_dist=_sample_std(dists),
        mean_iters=float(np.mean(iters)),
        converged_frac=float(np.mean(convs)),
    )


@dataclass(frozen=True)
class AggregateTable:
    rows: tuple[SweepRowRecord, ...]

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)


def default_parallelism() -> int:
    env = os.environ.get(WORKERS_ENV_VAR)
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"{WORKERS_ENV_VAR} must be an integer, got {env!r}") from exc
    return os.cpu_count() or 1


def run_sweep(config: SweepConfig, parallelism: int | None = None) -> AggregateTable:
    """Execute the full grid x replicates and aggregate per grid point.

    The result is a pure function of the config: independent of parallelism
    and of task completion order.  Graph-generation failures are counted per
    row instead of aborting the sweep.
    """
    if parallelism is None:
        parallelism = default_parallelism()
    cells = config.cells()
    tasks = [(config, gi, rep) for gi in range(len(cells)) for rep in range(config.replicates)]
    if parallelism <= 1 or len(tasks) == 1:
        outcomes = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            outcomes = list(pool.map(_run_task, tasks, chunksize=1))
    outcomes.sort(key=lambda item: (item[0], item[1]))

    by_cell: dict[int, list[RunResult]] = {gi: [] for gi in range(len(cells))}
    failures = {gi: 0 for gi in range(len(cells))}
    for gi, _rep, result, error in outcomes:
        if result is None:
            failures[gi] += 1
        else:
            by_cell[gi].append(result)

    rows = []
    for gi, (eps, gamma, mu_lfr) in enumerate(cells):
        results = by_cell[gi]
        if results:
            stats = aggregate(results)
        else:
            stats = RowStats(0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        rows.append(SweepRowRecord(
            topology=config.topology.kind,
            epsilon=eps,
            gamma=gamma,
            mu=config.mu,
            mu_lfr=mu_lfr,
            init=config.init.variant,
            replicates=config.replicates,
            failures=failures[gi],
            mean_C=stats.mean_C,
            std_C=stats.std_C,
            mean_n_clusters=stats.mean_n_clusters,
            mean_dist=stats.mean_dist,
            std_dist=stats.std_dist,
            mean_iters=stats.mean_iters,
            converged_frac=stats.converged_frac,
        ))
    return AggregateTable(rows=tuple(rows))


# --------------------------------------------------------------------------
# Presets and config files
# --------------------------------------------------------------------------

_FIG1_EPSILONS = (0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
_FIG1_GAMMAS = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0)
_LFR_EPSILONS = (0.2, 0.3)
_LFR_GAMMAS = (0.0, 0.5, 1.0, 1.5, 2.0)

_LFR_TOPOLOGY = TopologySpec(kind="lfr", n=250, tau1=3.0, tau2=1.5,
                             mu_lfr=(0.1, 0.5, 0.9), avg_deg=10.0, min_comm=50)

_PRESETS: dict[str, SweepConfig] = {
    "fig1-complete": SweepConfig(
        topology=TopologySpec(kind="complete", n=250),
        epsilon_values=_FIG1_EPSILONS, gamma_values=_FIG1_GAMMAS,
    ),
    "fig1-er": SweepConfig(
        topology=TopologySpec(kind="er", n=250, p=0.1),
        epsilon_values=_FIG1_EPSILONS, gamma_values=_FIG1_GAMMAS,
    ),
    "fig1-ba": SweepConfig(
        topology=TopologySpec(kind="ba", n=250, k=5),
        epsilon_values=_FIG1_EPSILONS, gamma_values=_FIG1_GAMMAS,
    ),
    "fig4-lfr-uniform": SweepConfig(
        topology=_LFR_TOPOLOGY,
        epsilon_values=_LFR_EPSILONS, gamma_values=_LFR_GAMMAS,
    ),
    "fig4-lfr-random-means": SweepConfig(
        topology=_LFR_TOPOLOGY,
        epsilon_values=_LFR_EPSILONS, gamma_values=_LFR_GAMMAS,
        init=InitSpec(variant="community_random_means", sigma=0.01),
    ),
    "fig4-lfr-polarized": SweepConfig(
        topology=_LFR_TOPOLOGY,
        epsilon_values=_LFR_EPSILONS, gamma_values=_LFR_GAMMAS,
        init=InitSpec(variant="community_fixed_means", sigma=0.01,
                      fixed_means=(0.25, 0.5, 0.75, 1.0)),
    ),
}


def preset_names() -> tuple[str, ...]:
    return tuple(_PRESETS)


def preset(name: str, master_seed: int | None = None) -> SweepConfig:
    """A named grid reproducing one of the reference figure sweeps."""
    try:
        config = _PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(_PRESETS)}") from None
    if master_seed is not None:
        config = replace(config, master_seed=master_seed)
    return config


def _check_keys(section: dict, allowed, where: str) -> None:
    unknown = sorted(set(section) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")


def load_config(path) -> SweepConfig:
    """Parse a YAML sweep config mirroring SweepConfig; unknown keys are errors."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = yaml.safe_load(fh)
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: config root must be a mapping")
    top_fields = {f.name for f in fields(SweepConfig)}
    _check_keys(doc, top_fields, "config root")
    if "topology" not in doc:
        raise ConfigError(f"{path}: missing required 'topology' section")
    topo_doc = doc["topology"]
    if not isinstance(topo_doc, dict):
        raise ConfigError(f"{path}: 'topology' must be a mapping")
    _check_keys(topo_doc, {f.name for f in fields(TopologySpec)}, "topology section")
    if "kind" not in topo_doc:
        raise ConfigError(f"{path}: topology section needs a 'kind'")
    kwargs = dict(doc)
    kwargs["topology"] = TopologySpec(**topo_doc)
    if "init" in kwargs:
        init_doc = kwargs["init"]
        if not isinstance(init_doc, dict):
            raise ConfigError(f"{path}: 'init' must be a mapping")
        _check_keys(init_doc, {f.name for f in fields(InitSpec)}, "init section")
        if "fixed_means" in init_doc:
            init_doc = dict(init_doc, fixed_means=tuple(init_doc["fixed_means"]))
        try:
            kwargs["init"] = InitSpec(**init_doc)
        except ValueError as exc:
            raise ConfigError(f"{path}: init: {exc}") from exc
    for key in ("epsilon_values", "gamma_values"):
        if key in kwargs:
            kwargs[key] = tuple(kwargs[key])
    try:
        return SweepConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
