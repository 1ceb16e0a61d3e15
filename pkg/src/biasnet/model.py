"""The opinion dynamics: state, parameters, and the simulation loop.

Update rule for a selected pair (i, j) with pre-update opinions x_i, x_j:
if |x_i - x_j| <= epsilon, both move toward each other by a fraction mu of
the gap (mu = 0.5 lands both on the pair average).  Partners are drawn among
graph neighbors with probability proportional to d^(-gamma), where d is the
opinion distance clamped from below by d_eps; gamma = 0 reduces to uniform
partner choice.

For gamma > 0 the initiator's own clamped distance takes part in the
selection normalization: with probability
d_eps^(-gamma) / (d_eps^(-gamma) + sum of neighbor weights) an attempt draws
no partner and changes nothing, as if the recommender surfaced the agent's
own position.  This term is what slows the strong-bias regime down to its
characteristic frozen fragmentation; conditional on a partner being drawn,
the distribution over neighbors is exactly the biased rule above.

A run consumes a single random stream seeded once: first the initial-opinion
draws, then per attempt one uniform for the initiator pick and one uniform
for the partner draw (the latter skipped for isolated initiators).  Runs are
bit-reproducible for a fixed seed, in or out of worker processes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .graphs import Graph
from .metrics import detect_clusters, dispersion, is_converged, participation_ratio

__all__ = [
    "ModelParams",
    "InitSpec",
    "OpinionState",
    "RunResult",
    "init_opinions",
    "partner_probabilities",
    "select_partner",
    "interact",
    "step",
    "run",
]

INIT_VARIANTS = ("uniform", "community_random_means", "community_fixed_means")


@dataclass(frozen=True)
class ModelParams:
    """Dynamics parameters plus stop criteria."""

    epsilon: float
    gamma: float
    mu: float = 0.5
    d_eps: float = 1e-4
    max_iterations: int = 100_000
    check_interval: int = 100
    conv_delta: float = 1e-6

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"confidence bound must be in [0, 1], got {self.epsilon}")
        if self.gamma < 0.0:
            raise ValueError(f"bias exponent must be >= 0, got {self.gamma}")
        if not 0.0 < self.mu <= 0.5:
            raise ValueError(f"convergence parameter must be in (0, 0.5], got {self.mu}")
        if not 0.0 < self.d_eps <= 1.0:
            raise ValueError(f"distance clamp must be in (0, 1], got {self.d_eps}")
        if self.max_iterations < 0 or self.check_interval < 1:
            raise ValueError("iteration counts must be non-negative (interval >= 1)")
        if self.conv_delta <= 0.0:
            raise ValueError(f"convergence tolerance must be positive, got {self.conv_delta}")


@dataclass(frozen=True)
class InitSpec:
    """How initial opinions are drawn.

    ``uniform`` ignores communities; the community variants require labels on
    the graph and draw each member from a normal around its community mean
    (random uniform means, or the fixed means cycled by community id), clipped
    to [0, 1].
    """

    variant: str = "uniform"
    sigma: float = 0.01
    fixed_means: tuple[float, ...] = (0.25, 0.5, 0.75, 1.0)

    def __post_init__(self):
        if self.variant not in INIT_VARIANTS:
            raise ValueError(f"unknown init variant {self.variant!r}; expected one of {INIT_VARIANTS}")
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not self.fixed_means or any(not 0.0 <= m <= 1.0 for m in self.fixed_means):
            raise ValueError("fixed means must be a non-empty sequence of values in [0, 1]")


@dataclass
class OpinionState:
    """Per-agent opinions in [0, 1] plus the completed-iteration counter."""

    opinions: np.ndarray
    iteration: int = 0


@dataclass
class RunResult:
    converged: bool
    iterations_used: int
    final_opinions: np.ndarray
    trace: list[tuple[int, float, float]] = field(default_factory=list)
    # trace rows: (iteration, cluster participation ratio, dispersion),
    # where dispersion is the unordered-pair distance sum over n^2


def init_opinions(g: Graph, spec: InitSpec, seed) -> OpinionState:
    """Draw initial opinions; ``seed`` may be an int or a Generator to continue
    an existing stream.  Community means are drawn in ascending community id
    order, then member values in node order."""
    rng = np.random.default_rng(seed)
    if spec.variant == "uniform":
        x = rng.random(g.n)
    else:
        if g.community is None:
            raise ValueError(f"init variant {spec.variant!r} requires community labels on the graph")
        n_comms = g.n_communities
        if spec.variant == "community_random_means":
            means = rng.random(n_comms)
        else:
            means = np.array([spec.fixed_means[c % len(spec.fixed_means)] for c in range(n_comms)])
        x = rng.normal(means[g.community], spec.sigma)
    np.clip(x, 0.0, 1.0, out=x)
    return OpinionState(opinions=x, iteration=0)


def partner_probabilities(state: OpinionState, g: Graph, i: int, gamma: float,
                          d_eps: float = 1e-4):
    """Neighbor ids of i and their selection probabilities under the biased
    rule, conditional on a partner being drawn (the self term cancels)."""
    lo = int(g.offsets[i])
    deg = int(g.offsets[i + 1]) - lo
    nbrs = g.neighbors[lo:lo + deg]
    if deg == 0:
        return nbrs, np.empty(0)
    lut, w_clamp = _kernels.weight_table(gamma, d_eps)
    scratch = np.empty(deg)
    total = _kernels._fill_weights(state.opinions, g.neighbors, lo, deg,
                                   state.opinions[i], gamma, d_eps, lut, w_clamp, scratch)
    if gamma == 0.0:
        probs = np.full(deg, 1.0 / deg)
    else:
        probs = scratch / total
    if __debug__:
        assert abs(probs.sum() - 1.0) < 1e-12, "selection probabilities must sum to 1"
    return nbrs, probs


def select_partner(state: OpinionState, g: Graph, i: int, gamma: float, rng,
                   d_eps: float = 1e-4):
    """Sample a partner for node i.

    Returns None when i has no neighbors, or when the draw lands on i's own
    clamped weight (possible only for gamma > 0).  Consumes exactly one
    uniform draw when i has neighbors, inverting the cumulative weight sum;
    the same compiled routine drives full runs.
    """
    if g.offsets[i + 1] == g.offsets[i]:
        return None
    lut, w_clamp = _kernels.weight_table(gamma, d_eps)
    scratch = np.empty(g.n)
    j = _kernels.select_one(state.opinions, g.offsets, g.neighbors, i, gamma,
                            d_eps, lut, w_clamp, rng.random(), scratch)
    return None if j < 0 else int(j)


def interact(state: OpinionState, i: int, j: int, epsilon: float, mu: float) -> bool:
    """Apply the bounded-confidence update to the pair (i, j) in place.

    Both moves are computed from the pre-update values; returns whether the
    pair was within the confidence bound (and therefore moved).
    """
    x = state.opinions
    diff = x[j] - x[i]
    if -epsilon <= diff <= epsilon:
        x[i] = x[i] + mu * diff
        x[j] = x[j] - mu * diff
        return True
    return False


def step(state: OpinionState, g: Graph, params: ModelParams, rng) -> int:
    """One iteration: exactly n interaction attempts.  Attempts that pick an
    isolated initiator or draw no partner count but change nothing.  Returns
    the number of opinion changes."""
    if len(state.opinions) != g.n:
        raise ValueError("opinion vector length must match the graph")
    lut, w_clamp = _kernels.weight_table(params.gamma, params.d_eps)
    scratch = np.empty(g.n)
    changes = _kernels.run_chunk(
        state.opinions, g.offsets, g.neighbors,
        params.epsilon, params.gamma, params.mu, params.d_eps,
        1, rng, lut, w_clamp, scratch,
    )
    state.iteration += 1
    return int(changes)


def run(g: Graph, spec: InitSpec, params: ModelParams, seed) -> RunResult:
    """Initialize opinions and iterate until the convergence predicate holds
    (checked every check_interval iterations) or max_iterations is reached.

    The trace records (iteration, participation ratio, dispersion) at every
    check, including the initial state.
    """
    rng = np.random.default_rng(seed)
    state = init_opinions(g, spec, rng)
    x = state.opinions
    lut, w_clamp = _kernels.weight_table(params.gamma, params.d_eps)
    scratch = np.empty(g.n)

    def sample(it: int) -> tuple[int, float, float]:
        return (it, participation_ratio(detect_clusters(x)), dispersion(x))

    trace = [sample(0)]
    converged = is_converged(x, g, params.epsilon, params.conv_delta)
    it = 0
    while not converged and it < params.max_iterations:
        chunk = min(params.check_interval, params.max_iterations - it)
        _kernels.run_chunk(x, g.offsets, g.neighbors,
                           params.epsilon, params.gamma, params.mu, params.d_eps,
                           chunk, rng, lut, w_clamp, scratch)
        it += chunk
        trace.append(sample(it))
        converged = is_converged(x, g, params.epsilon, params.conv_delta)
    state.iteration = it
    return RunResult(converged=converged, iterations_used=it, final_opinions=x, trace=trace)
