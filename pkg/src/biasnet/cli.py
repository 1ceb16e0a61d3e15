"""Command line interface.

Subcommands: generate-graph, run, sweep, metrics, presets.  Exit codes:
0 success, 1 invalid configuration or runtime failure (message on stderr),
2 usage errors (argparse).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .graphs import degree_stats, write_edge_list
from .metrics import detect_clusters, dispersion, participation_ratio
from .model import InitSpec, ModelParams, run
from .results import write_run_json, write_sweep_csv
from .sweep import (
    TOPOLOGY_STREAM,
    ConfigError,
    TopologySpec,
    build_topology,
    derive_seed,
    load_config,
    preset,
    preset_names,
    run_sweep,
)

log = logging.getLogger("biasnet")


def _add_topology_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--topology", required=True, choices=("complete", "er", "ba", "lfr"),
                   dest="kind", help="network kind")
    p.add_argument("--n", type=int, default=250, help="number of nodes (default 250)")
    p.add_argument("--p", type=float, help="edge probability (er)")
    p.add_argument("--k", type=int, help="edges per new node (ba)")
    p.add_argument("--tau1", type=float, default=3.0, help="degree exponent (lfr)")
    p.add_argument("--tau2", type=float, default=1.5, help="community-size exponent (lfr)")
    p.add_argument("--mu-lfr", type=float, help="inter-community mixing fraction (lfr)")
    p.add_argument("--avg-deg", type=float, default=10.0, help="target mean degree (lfr)")
    p.add_argument("--min-comm", type=int, default=50, help="minimum community size (lfr)")


def _topology_spec(args) -> TopologySpec:
    return TopologySpec(kind=args.kind, n=args.n, p=args.p, k=args.k,
                        tau1=args.tau1 if args.kind == "lfr" else None,
                        tau2=args.tau2 if args.kind == "lfr" else None,
                        mu_lfr=args.mu_lfr, avg_deg=args.avg_deg if args.kind == "lfr" else None,
                        min_comm=args.min_comm if args.kind == "lfr" else None)


def _add_init_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--init", default="uniform",
                   choices=("uniform", "community_random_means", "community_fixed_means"))
    p.add_argument("--sigma", type=float, default=0.01,
                   help="std dev around community means (default 0.01)")
    p.add_argument("--fixed-means", default="0.25,0.5,0.75,1.0",
                   help="comma-separated community means (default 0.25,0.5,0.75,1.0)")


def _init_spec(args) -> InitSpec:
    means = tuple(float(v) for v in args.fixed_means.split(","))
    return InitSpec(variant=args.init, sigma=args.sigma, fixed_means=means)


def _cmd_generate_graph(args) -> int:
    topo = _topology_spec(args)
    graph = build_topology(topo, topo.mu_lfr if topo.kind == "lfr" else None, args.seed)
    out = Path(args.out)
    community_path = None
    if graph.community is not None:
        community_path = out.with_name(out.name + ".communities")
    write_edge_list(graph, out, community_path)
    stats = degree_stats(graph)
    log.info("wrote %s (n=%d, edges=%d, avg degree %.2f, %d components)",
             out, graph.n, graph.n_edges, stats.avg_degree, stats.n_components)
    print(out)
    if community_path:
        print(community_path)
    return 0


def _cmd_run(args) -> int:
    topo = _topology_spec(args)
    graph_seed = args.graph_seed
    if graph_seed is None:
        graph_seed = derive_seed(args.seed, TOPOLOGY_STREAM, 0)
    graph = build_topology(topo, topo.mu_lfr if topo.kind == "lfr" else None, graph_seed)
    spec = _init_spec(args)
    params = ModelParams(epsilon=args.epsilon, gamma=args.gamma, mu=args.mu,
                         d_eps=args.d_eps, max_iterations=args.max_iterations,
                         check_interval=args.check_interval, conv_delta=args.conv_delta)
    result = run(graph, spec, params, args.seed)
    if args.out == "-":
        partition = detect_clusters(result.final_opinions)
        print(json.dumps({
            "converged": result.converged,
            "iterations_used": result.iterations_used,
            "C": participation_ratio(partition),
            "n_clusters": partition.n_clusters,
            "dispersion": dispersion(result.final_opinions),
        }))
    else:
        write_run_json(result, params, args.seed, args.out,
                       topology=topo.kind, init=spec.variant)
        log.info("wrote %s (converged=%s after %d iterations)",
                 args.out, result.converged, result.iterations_used)
        print(args.out)
    return 0


def _cmd_sweep(args) -> int:
    if (args.preset is None) == (args.config is None):
        print("sweep: exactly one of --preset or --config is required", file=sys.stderr)
        return 2
    if args.preset:
        config = preset(args.preset, master_seed=args.seed)
    else:
        config = load_config(args.config)
        if args.seed is not None:
            from dataclasses import replace
            config = replace(config, master_seed=args.seed)
    n_cells = len(config.cells())
    log.info("sweep: %d grid cells x %d replicates", n_cells, config.replicates)
    table = run_sweep(config, parallelism=args.workers)
    write_sweep_csv(table, args.out)
    log.info("wrote %s (%d rows)", args.out, len(table))
    print(args.out)
    return 0


def _cmd_metrics(args) -> int:
    values = []
    for line in Path(args.opinions).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            values.append(float(line))
    opinions = np.asarray(values)
    partition = detect_clusters(opinions, cluster_tol=args.cluster_tol)
    print(json.dumps({
        "n": len(values),
        "C": participation_ratio(partition),
        "n_clusters": partition.n_clusters,
        "dispersion": dispersion(opinions),
    }))
    return 0


def _cmd_presets(_args) -> int:
    for name in preset_names():
        config = preset(name)
        print(f"{name}: {config.topology.kind}, "
              f"{len(config.epsilon_values)} epsilon x {len(config.gamma_values)} gamma"
              f"{' x 3 mu_lfr' if config.topology.kind == 'lfr' else ''}, "
              f"init={config.init.variant}, replicates={config.replicates}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biasnet",
        description="Bounded-confidence opinion dynamics with biased partner selection.",
    )
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    parser.add_argument("--quiet", action="store_true", help="errors only")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate-graph", help="write an edge-list file (plus community sidecar)")
    _add_topology_args(p_gen)
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--out", required=True, help="edge-list output path")
    p_gen.set_defaults(func=_cmd_generate_graph)

    p_run = sub.add_parser("run", help="single simulation to RunResult JSON")
    _add_topology_args(p_run)
    _add_init_args(p_run)
    p_run.add_argument("--epsilon", type=float, required=True)
    p_run.add_argument("--gamma", type=float, required=True)
    p_run.add_argument("--mu", type=float, default=0.5)
    p_run.add_argument("--d-eps", type=float, default=1e-4)
    p_run.add_argument("--max-iterations", type=int, default=100_000)
    p_run.add_argument("--check-interval", type=int, default=100)
    p_run.add_argument("--conv-delta", type=float, default=1e-6)
    p_run.add_argument("--seed", type=int, required=True)
    p_run.add_argument("--graph-seed", type=int,
                       help="seed for the topology (default: derived from --seed)")
    p_run.add_argument("--out", default="-", help="output JSON path, '-' for a stdout summary")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="parameter sweep to CSV")
    p_sweep.add_argument("--preset", help="named grid (see 'presets')")
    p_sweep.add_argument("--config", help="YAML config path")
    p_sweep.add_argument("--out", required=True, help="CSV output path")
    p_sweep.add_argument("--workers", type=int, default=None,
                         help=f"worker processes (default: ${{{'BIASNET_WORKERS'}}} or CPU count)")
    p_sweep.add_argument("--seed", type=int, default=None, help="override the master seed")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_metrics = sub.add_parser("metrics", help="cluster count and dispersion of an opinion file")
    p_metrics.add_argument("--opinions", required=True, help="text file, one opinion per line")
    p_metrics.add_argument("--cluster-tol", type=float, default=0.01)
    p_metrics.set_defaults(func=_cmd_metrics)

    p_presets = sub.add_parser("presets", help="list named sweep presets")
    p_presets.set_defaults(func=_cmd_presets)
    return parser


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    level = logging.DEBUG if args.verbose else (logging.ERROR if args.quiet else logging.INFO)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
