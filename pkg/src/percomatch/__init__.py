"""percomatch: seed-based de-anonymization experiments on clustered
random geometric graphs.

Generate ground-truth graphs with controllable clustering, derive
anonymized observed pairs, attack them with percolation graph matching
(plain, filtered, staged sparse-cluster and bipartite dense-cluster
variants), and sweep the phase-transition and error-ratio experiments.
"""

from .geometry import (ModelParams, calibrate_density, calibrate_scale,
                       edge_probability, torus_distance)
from .graphs import (GroundTruthGraph, ObservedGraph, generate_er,
                     generate_ground_truth, load_graph, save_graph)
from .sampling import GraphPair, is_good_pair, load_pair, sample_pair, save_pair
from .pgm import (MatchResult, MatchState, PgmConfig, critical_seed_size,
                  run_pgm, run_pgm_bruteforce)
from .estimation import (DistanceCalibration, build_distance_calibration,
                         classify_edge_lengths, common_neighbors,
                         estimate_distance, filter_edges_geometric,
                         filter_edges_nearest_k, select_nodes_within)
from .bounds import tail_bounds
from .staged import (RegionSpec, StagedConfig, bipartite_pgm,
                     build_restricted_pairs, classify_by_seed_count,
                     dense_deanonymize, ring_expand, sparse_deanonymize,
                     threshold_match_rhs)
from .experiments import (ExperimentSpec, RunRecord, run_experiment,
                          run_table2_inverse, seeds_compact, seeds_uniform)
from .ingest import degree_filter, load_snap_edgelist

__version__ = "0.1.0"

__all__ = [
    "ModelParams", "torus_distance", "edge_probability",
    "calibrate_density", "calibrate_scale",
    "GroundTruthGraph", "ObservedGraph", "generate_ground_truth",
    "generate_er", "save_graph", "load_graph",
    "GraphPair", "sample_pair", "is_good_pair", "save_pair", "load_pair",
    "PgmConfig", "MatchState", "MatchResult", "run_pgm",
    "run_pgm_bruteforce", "critical_seed_size",
    "DistanceCalibration", "common_neighbors", "build_distance_calibration",
    "estimate_distance", "filter_edges_geometric", "filter_edges_nearest_k",
    "classify_edge_lengths", "select_nodes_within",
    "tail_bounds",
    "StagedConfig", "RegionSpec", "classify_by_seed_count",
    "build_restricted_pairs", "ring_expand", "bipartite_pgm",
    "threshold_match_rhs", "sparse_deanonymize", "dense_deanonymize",
    "ExperimentSpec", "RunRecord", "seeds_uniform", "seeds_compact",
    "run_experiment", "run_table2_inverse",
    "degree_filter", "load_snap_edgelist",
]
