"""Experiment harness: seed strategies, scenario grids, sweep runner.

A sweep executes `runs` independent (graph, sampling, seeds, match)
realizations per grid point, with the rng stream for each realization
derived as hash(master_seed, point, run_index). Output is a per-run CSV
(schema "# percomatch-csv v1"), a per-point aggregate CSV, and a JSON
summary; finished (point, run) keys are skipped on re-runs, so interrupted
sweeps resume.

Scoring convention: MatchResult counts exclude the seeds (they are given,
not found). Scenarios that reproduce matched-node curves add the seed count
back into the recorded ``good`` column (count_seeds_in_good); error ratios
always come from found matches only.
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass, field, asdict

import numpy as np

from .errors import ConfigError, InvalidNode
from .geometry import ModelParams, torus_distance_many
from .graphs import GroundTruthGraph, generate_er, generate_ground_truth
from .estimation import filter_edges_geometric, filter_edges_nearest_k
from .pgm import MatchResult, PgmConfig, run_pgm
from .rng import child_seed, generator_for
from .sampling import GraphPair, sample_pair
from .staged import StagedConfig, dense_deanonymize, sparse_deanonymize
from . import kernels

__all__ = [
    "ExperimentSpec",
    "RunRecord",
    "seeds_uniform",
    "seeds_compact",
    "run_experiment",
    "run_table2_inverse",
    "aggregate_records",
    "CSV_SCHEMA",
]

CSV_SCHEMA = "# percomatch-csv v1"

SCENARIOS = ("fig1_sweep", "fig2_error_vs_K", "fig3_algorithms",
             "fig4_filter_sweep", "table2_inverse", "er_baseline", "pokec",
             "custom")
ALGORITHMS = ("pgm", "pgm_filtered_geometric", "pgm_filtered_nearest_k",
              "sparse_pipeline", "dense_pipeline")

# scenarios whose y-axis counts matched nodes, seeds included
_COUNT_SEEDS_DEFAULT = {"fig1_sweep": True, "er_baseline": True,
                        "fig3_algorithms": True}


# ---------------------------------------------------------------------------
# Seed strategies
# ---------------------------------------------------------------------------

def seeds_uniform(pair: GraphPair, a0: int, rng: np.random.Generator) -> list:
    """a0 distinct good pairs chosen uniformly among all nodes."""
    if a0 > pair.n:
        raise InvalidNode(f"cannot draw {a0} seeds from {pair.n} nodes")
    nodes = rng.choice(pair.n, size=a0, replace=False)
    return [(int(v), int(pair.label2[v])) for v in nodes]


def seeds_compact(pair: GraphPair, a0: int, rng: np.random.Generator,
                  positions: np.ndarray | None = None,
                  graph: GroundTruthGraph | None = None) -> list:
    """a0 good pairs packed around a uniformly chosen center node.

    Proximity is true torus distance when positions are available, else
    descending common-neighbor count with the center (ties by id) on the
    provided graph (the ground truth for ingested data).
    """
    if a0 > pair.n:
        raise InvalidNode(f"cannot draw {a0} seeds from {pair.n} nodes")
    if a0 == 0:
        return []
    center = int(rng.integers(pair.n))
    if positions is not None:
        dist = torus_distance_many(positions, positions[center])
        order = np.lexsort((np.arange(pair.n), dist))
    else:
        g = graph if graph is not None else pair.g1
        counts = kernels.node_common_neighbors(g.indptr, g.indices, center,
                                               pair.n)
        counts[center] = np.iinfo(np.int64).max  # center always first
        order = np.lexsort((np.arange(pair.n), -counts))
    chosen = order[:a0]
    return [(int(v), int(pair.label2[v])) for v in chosen]


# ---------------------------------------------------------------------------
# Spec and records
# ---------------------------------------------------------------------------

@dataclass
class ExperimentSpec:
    """One sweep: a scenario grid, an algorithm, and execution knobs."""

    scenario: str
    model: dict = field(default_factory=dict)
    algorithm: str = "pgm"
    algo_params: dict = field(default_factory=dict)
    r: int = 5
    s: float = 0.8
    seed_strategy: str = "uniform"
    seed_counts: list = field(default_factory=list)
    runs: int = 100
    master_seed: int = 0
    out_path: str | None = None
    count_seeds_in_good: bool | None = None
    percolation_fraction: float = 0.5
    grid: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}")
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.seed_strategy not in ("uniform", "compact"):
            raise ConfigError("seed_strategy must be uniform or compact")
        counts = list(self.seed_counts)
        if self.scenario != "custom" or not self.grid.get("points"):
            if not counts:
                raise ConfigError("seed_counts must be non-empty")
            if any(b <= a for a, b in zip(counts, counts[1:])):
                raise ConfigError("seed_counts must be strictly increasing")

    @property
    def counts_seeds(self) -> bool:
        if self.count_seeds_in_good is not None:
            return self.count_seeds_in_good
        return _COUNT_SEEDS_DEFAULT.get(self.scenario, False)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentSpec":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad experiment spec JSON: {exc}") from exc
        known = {f for f in cls.__dataclass_fields__}
        extra = set(raw) - known
        if extra:
            raise ConfigError(f"unknown spec fields: {sorted(extra)}")
        return cls(**raw)


@dataclass
class RunRecord:
    """One realization at one grid point."""

    run_id: str
    scenario: str
    point: dict
    a0: int
    good: int
    bad: int
    error_ratio: float
    percolated: bool
    steps: int
    wall_ms: float
    run_seed: int


def point_key(point: dict) -> str:
    return json.dumps(point, sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# Grid construction
# ---------------------------------------------------------------------------

def build_grid(spec: ExperimentSpec) -> list:
    """The list of grid points (dicts) for a scenario."""
    g = spec.grid
    if spec.scenario == "custom" and g.get("points"):
        return [dict(p) for p in g["points"]]
    if spec.scenario in ("er_baseline", "pokec", "custom"):
        return [{"a0": int(a)} for a in spec.seed_counts]
    if spec.scenario == "fig1_sweep":
        K_values = g.get("K_values", [0.05, 0.2])
        strategies = g.get("strategies", ["uniform", "compact"])
        return [{"K": K, "strategy": st, "a0": int(a)}
                for K in K_values for st in strategies
                for a in spec.seed_counts]
    if spec.scenario == "fig2_error_vs_K":
        K_values = g.get("K_values", [0.05, 0.2, 0.4, 0.8])
        beta_values = g.get("beta_values", [3.0])
        a0_map = g.get("a0_by_K", {})
        points = []
        for beta in beta_values:
            for K in K_values:
                a_list = ([int(a0_map[str(K)])] if str(K) in a0_map
                          else [int(a) for a in spec.seed_counts])
                for a in a_list:
                    points.append({"K": K, "beta": beta, "a0": a})
        return points
    if spec.scenario == "fig3_algorithms":
        algos = g.get("algorithms", [{"algorithm": "pgm", "r": 5}])
        return [{**al, "a0": int(a)}
                for al in algos for a in spec.seed_counts]
    if spec.scenario == "fig4_filter_sweep":
        f_values = g.get("f_values", [1.0, 1.1, 1.2, 1.3])
        return [{"f": f, "a0": int(a)}
                for f in f_values for a in spec.seed_counts]
    if spec.scenario == "table2_inverse":
        raise ConfigError("table2_inverse runs through run_table2_inverse")
    raise ConfigError(f"no grid for scenario {spec.scenario!r}")


# ---------------------------------------------------------------------------
# Single realization
# ---------------------------------------------------------------------------

_params_cache: dict = {}


def _resolve_model(spec: ExperimentSpec, point: dict) -> ModelParams:
    model = dict(spec.model)
    for key in ("K", "beta", "degree", "C", "n", "k"):
        if key in point:
            model[key] = point[key]
    n = int(model.get("n", 10_000))
    k = int(model.get("k", 2))
    beta = float(model.get("beta", 3.0))
    cache_key = json.dumps(model, sort_keys=True)
    if cache_key in _params_cache:
        return _params_cache[cache_key]
    params = ModelParams(
        n=n, k=k, beta=beta,
        cluster_scale=model.get("C"),
        cluster_density=model.get("K"),
        target_degree=model.get("degree"),
        sample_prob=spec.s,
    ).resolved()
    _params_cache[cache_key] = params
    return params


def _make_truth(spec: ExperimentSpec, point: dict,
                rng: np.random.Generator,
                fixed_truth: GroundTruthGraph | None):
    if fixed_truth is not None:
        return fixed_truth, None
    model = dict(spec.model)
    if "er_p" in model or spec.scenario == "er_baseline":
        n = int(model.get("n", 10_000))
        if "er_p" in model:
            p = float(model["er_p"])
        else:
            p = float(model["degree"]) / (n - 1)
        return generate_er(n, p, rng), None
    params = _resolve_model(spec, point)
    return generate_ground_truth(params, rng), params


def _pick_seeds(spec: ExperimentSpec, point: dict, pair: GraphPair,
                truth: GroundTruthGraph, rng: np.random.Generator) -> list:
    a0 = int(point["a0"])
    strategy = point.get("strategy", spec.seed_strategy)
    if strategy == "uniform":
        return seeds_uniform(pair, a0, rng)
    return seeds_compact(pair, a0, rng, positions=truth.positions, graph=truth)


def _g2_positions(truth: GroundTruthGraph, pair: GraphPair) -> np.ndarray:
    # position of the node carrying g2 label j2 is the truth position of
    # its ground-truth identity
    return truth.positions[pair.alignment]


def _run_algorithm(spec: ExperimentSpec, point: dict, pair: GraphPair,
                   truth: GroundTruthGraph, params: ModelParams | None,
                   seeds: list, rng: np.random.Generator) -> MatchResult:
    algorithm = point.get("algorithm", spec.algorithm)
    r = int(point.get("r", spec.r))
    if algorithm == "pgm":
        return run_pgm(pair, seeds, PgmConfig(r=r, directed=truth.directed), rng)
    if algorithm == "pgm_filtered_geometric":
        x = float(point.get("f", spec.algo_params.get("x", 1.0)))
        C = params.C
        g1f = filter_edges_geometric(pair.g1, truth.positions, x, C)
        g2f = filter_edges_geometric(pair.g2, _g2_positions(truth, pair), x, C)
        fpair = GraphPair(g1=g1f, g2=g2f, alignment=pair.alignment,
                          source_meta=pair.source_meta)
        config = PgmConfig(r=r, directed=truth.directed,
                           edge_filter=f"geometric(x={x})")
        return run_pgm(fpair, seeds, config, rng)
    if algorithm == "pgm_filtered_nearest_k":
        k_nearest = int(point.get("k_nearest",
                                  spec.algo_params.get("k_nearest", 10)))
        g1f = filter_edges_nearest_k(pair.g1, k_nearest)
        g2f = filter_edges_nearest_k(pair.g2, k_nearest)
        fpair = GraphPair(g1=g1f, g2=g2f, alignment=pair.alignment,
                          source_meta=pair.source_meta)
        config = PgmConfig(r=r, directed=truth.directed,
                           edge_filter=f"nearest_k({k_nearest})")
        return run_pgm(fpair, seeds, config, rng)
    staged_kwargs = {key: spec.algo_params[key]
                     for key in ("alpha1", "alpha2", "delta", "alpha_exp",
                                 "lambda_band", "ring_threshold_scale")
                     if key in spec.algo_params}
    staged = StagedConfig(r=r, **staged_kwargs)
    if algorithm == "sparse_pipeline":
        return sparse_deanonymize(pair, seeds, staged, rng, params=params)
    halves = np.array_split(np.arange(len(seeds)), 2)
    seedsL = [seeds[i] for i in halves[0]]
    seedsR = [seeds[i] for i in halves[1]]
    return dense_deanonymize(pair, (seedsL, seedsR), staged, rng,
                             params=params)


def run_point_once(spec: ExperimentSpec, point: dict, run_idx: int,
                   fixed_truth: GroundTruthGraph | None = None) -> RunRecord:
    """Execute one realization; rng stream = hash(master, point, run)."""
    key = point_key(point)
    seed = child_seed(spec.master_seed, key, run_idx)
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    truth, params = _make_truth(spec, point, rng, fixed_truth)
    pair = sample_pair(truth, spec.s, rng)
    seeds = _pick_seeds(spec, point, pair, truth, rng)
    result = _run_algorithm(spec, point, pair, truth, params, seeds, rng)
    wall_ms = (time.perf_counter() - t0) * 1000.0

    good = result.good_count + (result.seed_count if spec.counts_seeds else 0)
    n = truth.n
    return RunRecord(
        run_id=f"{key}#{run_idx}",
        scenario=spec.scenario,
        point=point,
        a0=int(point["a0"]),
        good=good,
        bad=result.bad_count,
        error_ratio=result.error_ratio,
        percolated=bool(good >= spec.percolation_fraction * n),
        steps=result.steps,
        wall_ms=wall_ms,
        run_seed=seed,
    )


# ---------------------------------------------------------------------------
# Sweep runner
# ---------------------------------------------------------------------------

_CSV_COLUMNS = ["run_id", "scenario", "point", "a0", "good", "bad",
                "error_ratio", "percolated", "steps", "wall_ms", "run_seed"]


def _record_row(rec: RunRecord) -> str:
    return ",".join([
        json.dumps(rec.run_id), rec.scenario, json.dumps(point_key(rec.point)),
        str(rec.a0), str(rec.good), str(rec.bad), repr(rec.error_ratio),
        str(int(rec.percolated)), str(rec.steps), repr(rec.wall_ms),
        str(rec.run_seed),
    ])


def _completed_keys(path: str) -> set:
    done = set()
    if not os.path.exists(path):
        return done
    with open(path) as f:
        for line in f:
            if line.startswith("#") or line.startswith("run_id"):
                continue
            cell = line.split(",", 1)[0]
            if cell:
                done.add(json.loads(cell))
    return done


def aggregate_records(records: list, percolation_fraction: float = 0.5) -> list:
    """Per-point means and percolation probability, in grid order."""
    by_point: dict = {}
    order = []
    for rec in records:
        key = point_key(rec.point)
        if key not in by_point:
            by_point[key] = []
            order.append(key)
        by_point[key].append(rec)
    out = []
    for key in order:
        rows = by_point[key]
        goods = np.array([r.good for r in rows], dtype=float)
        bads = np.array([r.bad for r in rows], dtype=float)
        errs = np.array([r.error_ratio for r in rows], dtype=float)
        percs = np.array([r.percolated for r in rows], dtype=bool)
        perc_err = errs[percs]
        out.append({
            "point": rows[0].point,
            "a0": rows[0].a0,
            "runs": len(rows),
            "mean_good": float(goods.mean()),
            "mean_bad": float(bads.mean()),
            "mean_error_ratio": float(errs.mean()),
            "mean_error_percolated": (float(perc_err.mean())
                                      if perc_err.size else float("nan")),
            "percolation_prob": float(percs.mean()),
            "percolated_runs": int(percs.sum()),
        })
    return out


def run_experiment(spec: ExperimentSpec,
                   fixed_truth: GroundTruthGraph | None = None,
                   progress: bool = False) -> tuple:
    """Execute the sweep; returns (records, aggregates).

    With out_path set, writes <out>.csv (per-run), <out>.agg.csv and
    <out>.summary.json, skipping (point, run) keys already present in the
    per-run CSV. Records are canonically ordered by (point, run) in the
    final files.
    """
    if spec.scenario == "table2_inverse":
        raise ConfigError("table2_inverse runs through run_table2_inverse")
    points = build_grid(spec)
    done = set()
    existing_lines: list = []
    csv_path = spec.out_path + ".csv" if spec.out_path else None
    if csv_path:
        done = _completed_keys(csv_path)
        if os.path.exists(csv_path):
            with open(csv_path) as f:
                existing_lines = [ln.rstrip("\n") for ln in f
                                  if not ln.startswith("#")
                                  and not ln.startswith("run_id")]

    records = []
    new_lines = []
    for point in points:
        for run_idx in range(spec.runs):
            rid = f"{point_key(point)}#{run_idx}"
            if rid in done:
                continue
            rec = run_point_once(spec, point, run_idx, fixed_truth=fixed_truth)
            records.append(rec)
            new_lines.append(_record_row(rec))
        if progress:
            print(f"  point {point_key(point)} done")

    if csv_path:
        all_lines = existing_lines + new_lines
        all_lines.sort(key=lambda ln: _sort_key(ln))
        with open(csv_path, "w") as f:
            f.write(CSV_SCHEMA + "\n")
            f.write(",".join(_CSV_COLUMNS) + "\n")
            for ln in all_lines:
                f.write(ln + "\n")
        records = _read_records(csv_path)
    aggregates = aggregate_records(records, spec.percolation_fraction)
    if spec.out_path:
        _write_aggregates(spec, aggregates)
    return records, aggregates


def _sort_key(line: str):
    cell = json.loads(line.split(",", 1)[0])
    point, _, run = cell.rpartition("#")
    return (point, int(run))


def _read_records(csv_path: str) -> list:
    records = []
    with open(csv_path) as f:
        for line in f:
            line = line.rstrip("\n")
            if not line or line.startswith("#") or line.startswith("run_id"):
                continue
            parts = _split_csv(line)
            run_id = json.loads(parts[0])
            records.append(RunRecord(
                run_id=run_id,
                scenario=parts[1],
                point=json.loads(json.loads(parts[2])),
                a0=int(parts[3]),
                good=int(parts[4]),
                bad=int(parts[5]),
                error_ratio=float(parts[6]),
                percolated=bool(int(parts[7])),
                steps=int(parts[8]),
                wall_ms=float(parts[9]),
                run_seed=int(parts[10]),
            ))
    return records


def _split_csv(line: str) -> list:
    """Split a CSV row whose quoted cells are JSON strings (no embedded
    newlines)."""
    parts = []
    cur = []
    in_quote = False
    i = 0
    while i < len(line):
        ch = line[i]
        if ch == '"':
            in_quote = not in_quote
            cur.append(ch)
        elif ch == "," and not in_quote:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
        i += 1
    parts.append("".join(cur))
    return parts


def _write_aggregates(spec: ExperimentSpec, aggregates: list) -> None:
    agg_path = spec.out_path + ".agg.csv"
    with open(agg_path, "w") as f:
        f.write(CSV_SCHEMA + "\n")
        f.write("point,a0,runs,mean_good,mean_bad,mean_error_ratio,"
                "mean_error_percolated,percolation_prob\n")
        for row in aggregates:
            f.write(",".join([
                json.dumps(point_key(row["point"])), str(row["a0"]),
                str(row["runs"]), repr(row["mean_good"]), repr(row["mean_bad"]),
                repr(row["mean_error_ratio"]),
                repr(row["mean_error_percolated"]),
                repr(row["percolation_prob"]),
            ]) + "\n")
    summary = {
        "spec": asdict(spec),
        "aggregates": [
            {**{k: v for k, v in row.items() if k != "point"},
             "point": row["point"]} for row in aggregates
        ],
    }
    with open(spec.out_path + ".summary.json", "w") as f:
        json.dump(summary, f, indent=2)


# ---------------------------------------------------------------------------
# Table II style inverse search
# ---------------------------------------------------------------------------

def run_table2_inverse(spec: ExperimentSpec,
                       progress: bool = False) -> list:
    """Minimal (f, a0) meeting error and percolation targets per degree.

    For each average degree the filter grid is scanned with ascending seed
    counts; the smallest a0 over all filter factors wins (ties to the
    smaller f). Returns [{degree, f, a0, mean_error_ratio,
    percolation_prob}] rows; None entries mark degrees with no feasible
    combination in the grid.
    """
    g = spec.grid
    degrees = g.get("degree_values", [36, 45, 53, 64])
    f_values = g.get("f_values", [1.0, 1.1, 1.2, 1.3, 1.4])
    error_target = float(g.get("error_target", 0.03))
    percolation_target = float(g.get("percolation_target", 0.5))
    K = float(g.get("K", spec.model.get("K", 0.8)))

    rows = []
    for degree in degrees:
        best = None
        for f in f_values:
            for a0 in spec.seed_counts:
                if best is not None and a0 >= best["a0"]:
                    break
                point = {"K": K, "degree": degree, "f": f, "a0": int(a0),
                         "algorithm": "pgm_filtered_geometric"}
                sub = [run_point_once(spec, point, run_idx)
                       for run_idx in range(spec.runs)]
                agg = aggregate_records(sub, spec.percolation_fraction)[0]
                ok = (agg["percolation_prob"] >= percolation_target
                      and _error_metric(agg) <= error_target)
                if progress:
                    print(f"  degree={degree} f={f} a0={a0} "
                          f"perc={agg['percolation_prob']:.2f} "
                          f"err={_error_metric(agg):.3f} ok={ok}")
                if ok:
                    best = {"degree": degree, "f": f, "a0": int(a0),
                            "mean_error_ratio": _error_metric(agg),
                            "percolation_prob": agg["percolation_prob"]}
                    break
        rows.append(best if best is not None
                    else {"degree": degree, "f": None, "a0": None})
    if spec.out_path:
        with open(spec.out_path + ".table.csv", "w") as fobj:
            fobj.write(CSV_SCHEMA + "\n")
            fobj.write("degree,f,a0,mean_error_ratio,percolation_prob\n")
            for row in rows:
                fobj.write(",".join(str(row.get(c)) for c in
                                    ("degree", "f", "a0", "mean_error_ratio",
                                     "percolation_prob")) + "\n")
    return rows


def _error_metric(agg: dict) -> float:
    val = agg["mean_error_percolated"]
    if math.isnan(val):
        return agg["mean_error_ratio"]
    return val
