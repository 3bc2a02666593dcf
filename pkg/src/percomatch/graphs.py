"""Graph containers (CSR adjacency) and ground-truth generators.

Both the hidden social graph and the observed, anonymized views use the same
compact representation: per-node sorted neighbor lists stored as a CSR pair
(indptr, indices). Undirected graphs store both directions; directed graphs
store out-neighbors.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import InvalidNode
from .geometry import ModelParams
from .rng import stream_seed

__all__ = [
    "Adjacency",
    "GroundTruthGraph",
    "ObservedGraph",
    "generate_ground_truth",
    "generate_er",
    "save_graph",
    "load_graph",
]


def build_csr(n: int, edges_u: np.ndarray, edges_v: np.ndarray,
              directed: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """CSR (indptr, indices) from an edge array; rows come out sorted.

    Undirected edges are mirrored. Self-loops and duplicates are dropped.
    """
    eu = np.asarray(edges_u, dtype=np.int64)
    ev = np.asarray(edges_v, dtype=np.int64)
    keep = eu != ev
    eu, ev = eu[keep], ev[keep]
    if directed:
        src, dst = eu, ev
    else:
        src = np.concatenate([eu, ev])
        dst = np.concatenate([ev, eu])
    if src.size:
        flat = src * n + dst
        flat = np.unique(flat)
        src = flat // n
        dst = flat % n
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, dst.astype(np.int64)


@dataclass
class Adjacency:
    """Shared CSR behavior for graph containers."""

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    directed: bool = False

    def check_node(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise InvalidNode(f"node {i} outside [0, {self.n})")

    def neighbors(self, i: int) -> np.ndarray:
        self.check_node(i)
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def degree(self, i: int) -> int:
        self.check_node(i)
        return int(self.indptr[i + 1] - self.indptr[i])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def num_edges(self) -> int:
        m = int(self.indices.size)
        return m if self.directed else m // 2

    def edge_array(self) -> tuple[np.ndarray, np.ndarray]:
        """Edges as (u, v) arrays; u < v for undirected graphs."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        dst = self.indices
        if self.directed:
            return src, dst.copy()
        keep = src < dst
        return src[keep], dst[keep]

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        pos = np.searchsorted(row, v)
        return pos < row.size and row[pos] == v

    def mean_degree(self) -> float:
        return float(self.indices.size) / self.n

    def transitivity(self) -> float:
        """Global clustering coefficient 3 * triangles / wedges."""
        if self.directed:
            raise ValueError("transitivity implemented for undirected graphs")
        tri, wedges = kernels.triangles_and_wedges(self.indptr, self.indices)
        return 3.0 * tri / wedges if wedges else 0.0


@dataclass
class GroundTruthGraph(Adjacency):
    """The hidden graph both observed graphs are sampled from.

    ``positions`` is an (n, k) array for synthetic geometric graphs and None
    for Erdos-Renyi baselines and ingested real graphs.
    """

    positions: np.ndarray | None = None
    meta: dict = field(default_factory=dict)


@dataclass
class ObservedGraph(Adjacency):
    """One anonymized, edge-sampled view handed to the matcher."""


def _grid_offsets(k: int, ring: int) -> np.ndarray:
    """Half-space of cell displacements: first nonzero coordinate positive."""
    ranges = [np.arange(-ring, ring + 1)] * k
    grids = np.meshgrid(*ranges, indexing="ij")
    offs = np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)
    keep = np.zeros(len(offs), dtype=bool)
    for row in range(len(offs)):
        for a in range(k):
            if offs[row, a] != 0:
                keep[row] = offs[row, a] > 0
                break
    return offs[keep]


def generate_ground_truth(params: ModelParams, rng: np.random.Generator,
                          p_floor: float | None = None) -> GroundTruthGraph:
    """Sample the clustered geometric graph (positions + Bernoulli edges).

    Pairs within the cutoff distance are enumerated through a spatial grid
    of cell side ~C; the long-range remainder is generated exactly by
    dominated rejection at rate ``p_floor`` (default K * 3^-beta, i.e. a
    cutoff at 3C). No edges are lost to the split; metadata records both
    stage sizes.
    """
    p = params.resolved()
    n, k, beta, C, K = p.n, p.k, p.beta, p.C, p.K
    inf_beta = math.isinf(beta)

    positions = rng.random((n, k))
    d_torus_max = 0.5 * math.sqrt(k)

    if inf_beta:
        d_cut = C
        p_floor_eff = 0.0
    else:
        if p_floor is None:
            p_floor_eff = K * 3.0 ** (-beta)
        else:
            p_floor_eff = min(K, p_floor)
        d_cut = C * (K / p_floor_eff) ** (1.0 / beta)
        if d_cut >= d_torus_max:
            d_cut = d_torus_max
            p_floor_eff = 0.0

    M = max(1, int(1.0 / C))
    ring = max(1, math.ceil(d_cut * M))
    near_seed = stream_seed(rng)
    if 2 * ring + 3 >= M:
        eu, ev, checked = kernels.geometric_edges_allpairs(
            positions, K, C, beta, inf_beta, d_torus_max, np.uint64(near_seed))
        d_cut = d_torus_max
        p_floor_eff = 0.0
        grid_used = False
    else:
        cell = np.zeros(n, dtype=np.int64)
        mult = 1
        for a in range(k):
            cell += (positions[:, a] * M).astype(np.int64).clip(0, M - 1) * mult
            mult *= M
        order = np.argsort(cell, kind="stable").astype(np.int64)
        cell_start = np.zeros(M ** k + 1, dtype=np.int64)
        np.add.at(cell_start, cell + 1, 1)
        np.cumsum(cell_start, out=cell_start)
        offsets = _grid_offsets(k, ring)
        eu, ev, checked = kernels.geometric_edges_grid(
            positions, order, cell_start, offsets, M, K, C, beta, inf_beta,
            d_cut, np.uint64(near_seed))
        grid_used = True

    tail_candidates = 0
    if p_floor_eff > 0.0:
        tail_seed = stream_seed(rng)
        tu, tv, tail_candidates = kernels.geometric_edges_tail(
            positions, K, C, beta, inf_beta, d_cut, p_floor_eff, np.uint64(tail_seed))
        eu = np.concatenate([eu, tu])
        ev = np.concatenate([ev, tv])

    indptr, indices = build_csr(n, eu, ev, directed=False)
    meta = {
        "model": p.to_dict(),
        "d_cut": d_cut,
        "p_floor": p_floor_eff,
        "expected_missed_edges": 0.0,  # tail stage is exact, not truncated
        "grid_used": grid_used,
        "near_pairs_checked": int(checked),
        "tail_candidates": int(tail_candidates),
    }
    return GroundTruthGraph(n=n, indptr=indptr, indices=indices,
                            directed=False, positions=positions, meta=meta)


def generate_er(n: int, p: float, rng: np.random.Generator) -> GroundTruthGraph:
    """Erdos-Renyi G(n, p) baseline; no positions."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("edge probability must lie in [0, 1]")
    eu, ev = kernels.er_edges(n, p, np.uint64(stream_seed(rng)))
    indptr, indices = build_csr(n, eu, ev, directed=False)
    return GroundTruthGraph(n=n, indptr=indptr, indices=indices,
                            directed=False, positions=None,
                            meta={"model": {"er_p": p, "n": n}})


def save_graph(graph: GroundTruthGraph, path_prefix: str) -> dict:
    """Write edge list, optional positions CSV, and a JSON metadata sidecar.

    Edge list is one "u v" per line (0-based ids); positions are CSV rows
    "id,x0,...,x{k-1}". Returns the metadata written.
    """
    edges_path = path_prefix + ".edges.txt"
    eu, ev = graph.edge_array()
    with open(edges_path, "w") as f:
        for u, v in zip(eu.tolist(), ev.tolist()):
            f.write(f"{u} {v}\n")
    positions_path = None
    if graph.positions is not None:
        positions_path = path_prefix + ".positions.csv"
        with open(positions_path, "w") as f:
            for i, row in enumerate(graph.positions):
                f.write(",".join([str(i)] + [repr(x) for x in row]) + "\n")
    model = graph.meta.get("model", {})
    meta = {
        "n": graph.n,
        "k": model.get("k"),
        "beta": model.get("beta"),
        "C": model.get("C"),
        "K": model.get("K"),
        "seed": graph.meta.get("seed"),
        "directed": graph.directed,
        "positions_path": (os.path.basename(positions_path)
                           if positions_path else None),
        "generation": {key: graph.meta[key]
                       for key in ("d_cut", "p_floor", "expected_missed_edges")
                       if key in graph.meta},
    }
    with open(path_prefix + ".meta.json", "w") as f:
        json.dump(meta, f, indent=2)
    return meta


def load_graph(path_prefix: str) -> GroundTruthGraph:
    """Read a graph written by save_graph."""
    with open(path_prefix + ".meta.json") as f:
        meta = json.load(f)
    n = int(meta["n"])
    directed = bool(meta.get("directed", False))
    eu, ev = [], []
    with open(path_prefix + ".edges.txt") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            a, b = line.split()
            eu.append(int(a))
            ev.append(int(b))
    indptr, indices = build_csr(n, np.array(eu, dtype=np.int64),
                                np.array(ev, dtype=np.int64), directed=directed)
    positions = None
    if meta.get("positions_path"):
        pos_path = os.path.join(os.path.dirname(path_prefix) or ".",
                                meta["positions_path"])
        raw = np.loadtxt(pos_path, delimiter=",", ndmin=2)
        positions = raw[np.argsort(raw[:, 0]), 1:]
    model = {"n": n, "k": meta.get("k"), "beta": meta.get("beta"),
             "C": meta.get("C"), "K": meta.get("K")}
    return GroundTruthGraph(n=n, indptr=indptr, indices=indices,
                            directed=directed, positions=positions,
                            meta={"model": model})
