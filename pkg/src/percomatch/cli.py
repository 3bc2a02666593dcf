"""Command-line surface.

Subcommands:
  generate   write a synthetic graph (edge list + metadata + positions)
  calibrate  solve K from (C, degree) or C from (K, degree); optional
             common-neighbor calibration curve export
  match      one matching run on a stored or freshly sampled pair,
             MatchResult as JSON on stdout
  sweep      ExperimentSpec JSON -> per-run CSV + aggregate CSV + JSON
             summary + rendered figure
  pokec      ingest a SNAP edge list, degree-filter it, run a sweep

Exit codes: 0 success, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .errors import ConfigError, ParseError, PercomatchError
from .estimation import (build_distance_calibration, classify_edge_lengths,
                         filter_edges_geometric, filter_edges_nearest_k)
from .experiments import (ExperimentSpec, run_experiment, run_table2_inverse,
                          seeds_compact, seeds_uniform)
from .geometry import ModelParams, calibrate_density, calibrate_scale
from .graphs import generate_er, generate_ground_truth, load_graph, save_graph
from .ingest import degree_filter, load_snap_edgelist
from .pgm import PgmConfig, run_pgm
from .sampling import load_pair, sample_pair
from . import report


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ParseError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    except PercomatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="percomatch",
        description="clustered-graph de-anonymization simulation lab")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("generate", help="generate a synthetic graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--beta", type=float, default=3.0)
    p.add_argument("--C", type=float, default=None)
    p.add_argument("--K", type=float, default=None)
    p.add_argument("--degree", type=float, default=None)
    p.add_argument("--er-p", type=float, default=None,
                   help="Erdos-Renyi baseline instead of the geometric model")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("calibrate", help="degree calibration")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--beta", type=float, default=3.0)
    p.add_argument("--C", type=float, default=None)
    p.add_argument("--K", type=float, default=None)
    p.add_argument("--degree", type=float, required=True)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--curve", default=None,
                   help="also export the common-neighbor curve CSV here")
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("match", help="single matching run")
    p.add_argument("--pair", default=None, help="pair manifest JSON path")
    p.add_argument("--truth", default=None,
                   help="graph path prefix to sample a pair from")
    p.add_argument("--s", type=float, default=0.8)
    p.add_argument("--seeds", type=int, required=True)
    p.add_argument("--strategy", choices=["uniform", "compact"],
                   default="uniform")
    p.add_argument("--r", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--directed", action="store_true")
    p.add_argument("--filter-geometric", type=float, default=None,
                   metavar="X", help="drop edges shorter than X*C first")
    p.add_argument("--filter-nearest-k", type=int, default=None, metavar="K",
                   help="drop each node's K most-common-neighbor edges first")
    p.add_argument("--band", default=None, metavar="DL,DH",
                   help="also report the edge length band partition sizes")
    p.set_defaults(func=_cmd_match)

    p = sub.add_parser("sweep", help="run an experiment spec")
    p.add_argument("--spec", required=True, help="ExperimentSpec JSON path")
    p.add_argument("--out", default=None, help="override spec.out_path")
    p.add_argument("--no-figure", action="store_true")
    p.add_argument("--progress", action="store_true")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("pokec", help="ingest + degree-filter + sweep")
    p.add_argument("--edges", required=True, help="SNAP edge list path")
    p.add_argument("--min-in", type=int, default=20)
    p.add_argument("--max-out", type=int, default=200)
    p.add_argument("--s", type=float, default=0.8)
    p.add_argument("--r", type=int, default=6)
    p.add_argument("--seed-counts", default="60,120,240,480",
                   help="comma-separated a0 grid")
    p.add_argument("--runs", type=int, default=5)
    p.add_argument("--strategy", choices=["uniform", "compact"],
                   default="compact")
    p.add_argument("--filter-nearest-k", type=int, default=10)
    p.add_argument("--no-filter", action="store_true")
    p.add_argument("--master-seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--no-figure", action="store_true")
    p.set_defaults(func=_cmd_pokec)

    return parser


def _cmd_generate(args) -> int:
    rng = np.random.default_rng(args.seed)
    if args.er_p is not None:
        graph = generate_er(args.n, args.er_p, rng)
    else:
        params = ModelParams(n=args.n, k=args.k, beta=args.beta,
                             cluster_scale=args.C, cluster_density=args.K,
                             target_degree=args.degree)
        graph = generate_ground_truth(params, rng)
    graph.meta["seed"] = args.seed
    meta = save_graph(graph, args.out)
    print(json.dumps({"n": graph.n, "edges": graph.num_edges,
                      "mean_degree": graph.mean_degree(), **{
                          k: meta.get(k) for k in ("C", "K", "beta")}}))
    return 0


def _cmd_calibrate(args) -> int:
    if (args.C is None) == (args.K is None):
        raise ConfigError("give exactly one of --C / --K together with --degree")
    if args.C is not None:
        K = calibrate_density(args.n, args.k, args.beta, args.C, args.degree)
        C = args.C
    else:
        C = calibrate_scale(args.n, args.k, args.beta, args.K, args.degree)
        K = args.K
    out = {"n": args.n, "k": args.k, "beta": args.beta, "C": C, "K": K,
           "target_degree": args.degree}
    if args.curve:
        params = ModelParams(n=args.n, k=args.k, beta=args.beta,
                             cluster_scale=C, cluster_density=K,
                             sample_prob=args.s)
        cal = build_distance_calibration(params)
        cal.export_csv(args.curve)
        out["curve"] = args.curve
    print(json.dumps(out))
    return 0


def _cmd_match(args) -> int:
    rng = np.random.default_rng(args.seed)
    truth = None
    if args.pair:
        pair = load_pair(args.pair)
    elif args.truth:
        truth = load_graph(args.truth)
        pair = sample_pair(truth, args.s, rng)
    else:
        raise ConfigError("need --pair or --truth")

    model = pair.source_meta.get("truth_meta", {}).get("model", {}) \
        if truth is None else truth.meta.get("model", {})
    C = model.get("C")

    g1, g2 = pair.g1, pair.g2
    filter_label = None
    if args.filter_geometric is not None:
        if truth is None or truth.positions is None:
            raise ConfigError("--filter-geometric needs a positions-bearing "
                              "--truth graph")
        if C is None:
            raise ConfigError("graph metadata lacks C")
        pos2 = truth.positions[pair.alignment]
        g1 = filter_edges_geometric(g1, truth.positions, args.filter_geometric, C)
        g2 = filter_edges_geometric(g2, pos2, args.filter_geometric, C)
        filter_label = f"geometric(x={args.filter_geometric})"
    if args.filter_nearest_k is not None:
        g1 = filter_edges_nearest_k(g1, args.filter_nearest_k)
        g2 = filter_edges_nearest_k(g2, args.filter_nearest_k)
        filter_label = f"nearest_k({args.filter_nearest_k})"
    if g1 is not pair.g1:
        from .sampling import GraphPair
        pair = GraphPair(g1=g1, g2=g2, alignment=pair.alignment,
                         source_meta=pair.source_meta)

    if args.strategy == "uniform":
        seeds = seeds_uniform(pair, args.seeds, rng)
    else:
        positions = truth.positions if truth is not None else None
        seeds = seeds_compact(pair, args.seeds, rng, positions=positions,
                              graph=truth)
    config = PgmConfig(r=args.r, directed=args.directed,
                       edge_filter=filter_label)
    result = run_pgm(pair, seeds, config, rng)
    out = {
        "n": pair.n,
        "a0": args.seeds,
        "strategy": args.strategy,
        "r": args.r,
        "filter": filter_label,
        "good": result.good_count,
        "bad": result.bad_count,
        "error_ratio": result.error_ratio,
        "steps": result.steps,
        "matched_total": result.total_matched,
    }
    if args.band:
        try:
            d_l, d_h = (float(x) for x in args.band.split(","))
        except ValueError as exc:
            raise ConfigError(f"--band expects 'dL,dH', got {args.band!r}") \
                from exc
        params = ModelParams.from_dict(model)
        cal = build_distance_calibration(params)
        classes = classify_edge_lengths(pair.g1, cal, d_l, d_h)
        out["band_partition_g1"] = {
            "short": int(len(classes.short)),
            "band": int(len(classes.band)),
            "long": int(len(classes.long)),
        }
    print(json.dumps(out))
    return 0


def _cmd_sweep(args) -> int:
    with open(args.spec) as f:
        spec = ExperimentSpec.from_json(f.read())
    if args.out:
        spec.out_path = args.out
    if spec.out_path is None:
        raise ConfigError("spec.out_path (or --out) required for sweep")
    if spec.scenario == "table2_inverse":
        rows = run_table2_inverse(spec, progress=args.progress)
        if not args.no_figure:
            report.render_table_figure(rows, spec.out_path + ".png")
        print(json.dumps({"table": rows}))
        return 0
    records, aggregates = run_experiment(spec, progress=args.progress)
    if not args.no_figure:
        report.render_sweep_figure(aggregates, spec.scenario,
                                   spec.out_path + ".png")
    print(json.dumps({"runs": len(records),
                      "csv": spec.out_path + ".csv",
                      "points": len(aggregates)}))
    return 0


def _cmd_pokec(args) -> int:
    raw = load_snap_edgelist(args.edges)
    filtered = degree_filter(raw, args.min_in, args.max_out)
    ingest_meta = {
        "raw_vertices": raw.n,
        "raw_edges": raw.num_edges,
        "filtered_vertices": filtered.n,
        "filtered_edges": filtered.num_edges,
        "mean_out_degree": filtered.meta["mean_out_degree"],
        "mean_in_degree": filtered.meta["mean_in_degree"],
        "mean_total_half": filtered.meta["mean_total_half"],
    }
    with open(args.out + ".ingest.json", "w") as f:
        json.dump(ingest_meta, f, indent=2)
    print(json.dumps(ingest_meta))

    seed_counts = [int(x) for x in args.seed_counts.split(",") if x]
    algorithm = ("pgm" if args.no_filter else "pgm_filtered_nearest_k")
    spec = ExperimentSpec(
        scenario="pokec",
        model={"graph": "pokec"},
        algorithm=algorithm,
        algo_params={"k_nearest": args.filter_nearest_k},
        r=args.r,
        s=args.s,
        seed_strategy=args.strategy,
        seed_counts=seed_counts,
        runs=args.runs,
        master_seed=args.master_seed,
        out_path=args.out,
    )
    records, aggregates = run_experiment(spec, fixed_truth=filtered,
                                         progress=True)
    if not args.no_figure:
        report.render_sweep_figure(aggregates, spec.scenario,
                                   spec.out_path + ".png")
    print(json.dumps({"runs": len(records), "points": len(aggregates)}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
