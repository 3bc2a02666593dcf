"""Observed-graph construction: edge sampling plus anonymizing relabeling.

Each ground-truth edge is sampled twice, independently with probability s,
to decide its presence in the two observed graphs. The second graph's labels
are then permuted uniformly at random; the permutation is kept on the
GraphPair strictly for evaluation (seed provisioning and scoring). Matching
code never reads it.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidNode
from .graphs import GroundTruthGraph, ObservedGraph, build_csr

__all__ = ["GraphPair", "sample_pair", "is_good_pair", "save_pair", "load_pair"]


@dataclass
class GraphPair:
    """Two observed graphs plus the secret alignment used only for scoring.

    ``alignment[j2]`` is the g1 label of the node carrying label j2 in g2.
    ``label2[i1]`` is the inverse map (g1 label to g2 label).
    """

    g1: ObservedGraph
    g2: ObservedGraph
    alignment: np.ndarray
    source_meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.label2 = np.argsort(self.alignment).astype(np.int64)

    @property
    def n(self) -> int:
        return self.g1.n

    def good_pair_for(self, i1: int) -> tuple[int, int]:
        """The correct candidate pair for ground-truth/g1 node i1."""
        self.g1.check_node(i1)
        return i1, int(self.label2[i1])


def sample_pair(truth: GroundTruthGraph, s: float,
                rng: np.random.Generator) -> GraphPair:
    """Independent double edge sampling followed by a uniform relabeling.

    Draw order is fixed: the g1 keep mask over the canonical edge array,
    then the g2 keep mask, then the permutation, so a shared seed gives a
    bit-identical pair.
    """
    if not 0.0 <= s <= 1.0:
        raise ValueError("sampling probability must lie in [0, 1]")
    n = truth.n
    eu, ev = truth.edge_array()
    m = eu.size
    keep1 = rng.random(m) < s
    keep2 = rng.random(m) < s
    perm = rng.permutation(n).astype(np.int64)

    indptr1, indices1 = build_csr(n, eu[keep1], ev[keep1],
                                  directed=truth.directed)
    indptr2, indices2 = build_csr(n, perm[eu[keep2]], perm[ev[keep2]],
                                  directed=truth.directed)
    g1 = ObservedGraph(n=n, indptr=indptr1, indices=indices1,
                       directed=truth.directed)
    g2 = ObservedGraph(n=n, indptr=indptr2, indices=indices2,
                       directed=truth.directed)
    alignment = np.argsort(perm).astype(np.int64)
    meta = {"s": s, "truth_meta": truth.meta}
    return GraphPair(g1=g1, g2=g2, alignment=alignment, source_meta=meta)


def is_good_pair(pair: GraphPair, i1: int, j2: int) -> bool:
    """Evaluation-only oracle: does g2 label j2 correspond to g1 label i1?"""
    if not 0 <= i1 < pair.n:
        raise InvalidNode(f"node {i1} outside [0, {pair.n})")
    if not 0 <= j2 < pair.n:
        raise InvalidNode(f"node {j2} outside [0, {pair.n})")
    return int(pair.alignment[j2]) == i1


def _write_edges(graph: ObservedGraph, path: str) -> None:
    eu, ev = graph.edge_array()
    with open(path, "w") as f:
        for u, v in zip(eu.tolist(), ev.tolist()):
            f.write(f"{u} {v}\n")


def save_pair(pair: GraphPair, path_prefix: str, seed=None) -> None:
    """Two edge-list files, an alignment CSV, and a JSON manifest.

    The alignment goes to its own file ("g2_id,g1_id" rows) so stored runs
    can be scored without regenerating the pair.
    """
    base = os.path.basename(path_prefix)
    _write_edges(pair.g1, path_prefix + ".g1.edges.txt")
    _write_edges(pair.g2, path_prefix + ".g2.edges.txt")
    align_path = path_prefix + ".alignment.csv"
    with open(align_path, "w") as f:
        for j2, i1 in enumerate(pair.alignment.tolist()):
            f.write(f"{j2},{i1}\n")
    manifest = {
        "n": pair.n,
        "directed": pair.g1.directed,
        "s": pair.source_meta.get("s"),
        "seed": seed,
        "g1_path": base + ".g1.edges.txt",
        "g2_path": base + ".g2.edges.txt",
        "alignment_path": base + ".alignment.csv",
    }
    with open(path_prefix + ".pair.json", "w") as f:
        json.dump(manifest, f, indent=2)


def _read_edges(path: str, n: int, directed: bool) -> ObservedGraph:
    eu, ev = [], []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            a, b = line.split()
            eu.append(int(a))
            ev.append(int(b))
    indptr, indices = build_csr(n, np.array(eu, dtype=np.int64),
                                np.array(ev, dtype=np.int64), directed=directed)
    return ObservedGraph(n=n, indptr=indptr, indices=indices, directed=directed)


def load_pair(manifest_path: str) -> GraphPair:
    with open(manifest_path) as f:
        manifest = json.load(f)
    folder = os.path.dirname(manifest_path) or "."
    n = int(manifest["n"])
    directed = bool(manifest.get("directed", False))
    g1 = _read_edges(os.path.join(folder, manifest["g1_path"]), n, directed)
    g2 = _read_edges(os.path.join(folder, manifest["g2_path"]), n, directed)
    alignment = np.full(n, -1, dtype=np.int64)
    with open(os.path.join(folder, manifest["alignment_path"])) as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            j2, i1 = line.split(",")
            alignment[int(j2)] = int(i1)
    return GraphPair(g1=g1, g2=g2, alignment=alignment,
                     source_meta={"s": manifest.get("s")})
