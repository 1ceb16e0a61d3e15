"""Opinion dynamics with bounded confidence and biased partner selection.

The package simulates a population of agents holding continuous opinions in
[0, 1] on a social network.  At every iteration each of N interaction attempts
picks a random agent, draws a partner among its neighbors with probability
proportional to a negative power of their opinion distance, and lets the pair
average their opinions when they are closer than a confidence bound.

Subpackages:

* ``graphs``   -- network constructions (complete, Erdos-Renyi, Barabasi-Albert,
  LFR benchmark with planted communities) and edge-list serialization
* ``model``    -- the opinion dynamics itself (state, parameters, single runs)
* ``metrics``  -- cluster extraction, participation ratio, pairwise distance,
  convergence predicate
* ``sweep``    -- deterministic parameter sweeps with replicate aggregation
* ``results``  -- CSV / JSON persistence of run and sweep outputs
* ``cli``      -- command line entry points
"""

from .graphs import (
    DegreeStats,
    GenerationFailedError,
    GenerationInfeasibleError,
    Graph,
    degree_stats,
    generate_ba,
    generate_complete,
    generate_er,
    generate_lfr,
    read_edge_list,
    write_edge_list,
)
from .metrics import (
    ClusterPartition,
    avg_pairwise_distance,
    detect_clusters,
    dispersion,
    is_converged,
    participation_ratio,
)
from .model import (
    InitSpec,
    ModelParams,
    OpinionState,
    RunResult,
    init_opinions,
    interact,
    partner_probabilities,
    run,
    select_partner,
    step,
)
from .sweep import (
    AggregateTable,
    SweepConfig,
    TopologySpec,
    aggregate,
    derive_seed,
    load_config,
    preset,
    preset_names,
    run_sweep,
)
from .results import (
    SweepRowRecord,
    read_run_json,
    read_sweep_csv,
    write_run_json,
    write_sweep_csv,
)

__version__ = "0.1.0"
