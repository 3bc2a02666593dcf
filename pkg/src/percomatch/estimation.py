"""Distance estimation from common neighbors, and the PGM edge filters.

Two nodes at torus distance d share on average
E[N(d)] = (n-2) s^2 K^2 int f(|x - x_i|) f(|x - x_j|) dx
common neighbors, a strictly decreasing (hence invertible) function of d.
The calibration tabulates that curve once per model; inversion turns
observed common-neighbor counts into distance estimates, which drive the
edge-length band classifier and the local node selector. The two filters
used by filtered PGM (geometric cutoff and nearest-k by common neighbors)
also live here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.stats import qmc

from . import kernels
from .errors import BandRangeError, InvalidNode, MissingPositions, NonMonotone
from .geometry import ModelParams, profile
from .graphs import ObservedGraph, build_csr

__all__ = [
    "DistanceCalibration",
    "DistanceEstimate",
    "common_neighbors",
    "build_distance_calibration",
    "estimate_distance",
    "estimate_distances",
    "filter_edges_geometric",
    "filter_edges_nearest_k",
    "classify_edge_lengths",
    "EdgeLengthClasses",
    "select_nodes_within",
]

VALID_RANGE_SAFETY = 0.8


class DistanceEstimate(NamedTuple):
    distance: float
    saturated: bool


@dataclass
class DistanceCalibration:
    """Tabulated map d -> E[N(d)] on [0, d_max], strictly decreasing.

    ``d_grid`` and ``counts`` hold the tabulation; ``d_max`` is the far end
    of the invertible range (counts below counts[-1] saturate there).
    """

    model: ModelParams
    d_grid: np.ndarray
    counts: np.ndarray
    d_max: float
    meta: dict

    def expected_count(self, d) -> np.ndarray | float:
        """E[N(d)] by linear interpolation (clamped beyond d_max)."""
        return np.interp(d, self.d_grid, self.counts)

    def export_csv(self, path: str) -> None:
        with open(path, "w") as f:
            f.write("d,expected_count\n")
            for d, c in zip(self.d_grid.tolist(), self.counts.tolist()):
                f.write(f"{d!r},{c!r}\n")


def common_neighbors(g: ObservedGraph, i: int, j: int) -> int:
    """|N(i) & N(j)| by sorted-list intersection."""
    g.check_node(i)
    g.check_node(j)
    if i == j:
        raise ValueError("common_neighbors needs two distinct nodes")
    return int(kernels.pair_common_neighbors(g.indptr, g.indices, i, j))


def _product_integral_fft(k: int, beta: float, C: float, d_values: np.ndarray,
                          grid_m: int) -> np.ndarray:
    """int f(|x|) f(|x - d e1|) dx on the torus via circular convolution.

    The FFT of the sampled profile squared is exactly the discrete circular
    convolution, i.e. a midpoint-rule quadrature of the torus integral,
    periodic boundary included for free.
    """
    axis = np.arange(grid_m)
    wrapped = np.minimum(axis, grid_m - axis) / grid_m
    if k == 1:
        dist = wrapped
    else:
        dist = np.sqrt(wrapped[:, None] ** 2 + wrapped[None, :] ** 2)
    F = profile(dist, C, beta)
    if k == 1:
        conv = np.fft.irfft(np.fft.rfft(F) ** 2, n=grid_m) / grid_m
        line = conv
    else:
        conv = np.fft.irfft2(np.fft.rfft2(F) ** 2, s=(grid_m, grid_m))
        line = conv[:, 0] / grid_m ** 2
    half = grid_m // 2
    sample_d = axis[: half + 1] / grid_m
    return np.interp(d_values, sample_d, line[: half + 1])


def _product_integral_qmc(k: int, beta: float, C: float,
                          d_values: np.ndarray) -> np.ndarray:
    sampler = qmc.Sobol(d=k, scramble=True, seed=20240917)
    pts = sampler.random_base2(m=17)
    xi = np.full(k, 0.5)
    diff = np.abs(pts - xi)
    diff = np.minimum(diff, 1.0 - diff)
    fa = profile(np.sqrt(np.sum(diff * diff, axis=1)), C, beta)
    out = np.empty(d_values.size)
    for t, d in enumerate(d_values):
        xj = xi.copy()
        xj[0] = (xi[0] + d) % 1.0
        diff = np.abs(pts - xj)
        diff = np.minimum(diff, 1.0 - diff)
        fb = profile(np.sqrt(np.sum(diff * diff, axis=1)), C, beta)
        out[t] = float(np.mean(fa * fb))
    return out


def build_distance_calibration(params: ModelParams, num_points: int = 256,
                               grid_m: int | None = None,
                               safety: float = VALID_RANGE_SAFETY,
                               ) -> DistanceCalibration:
    """Tabulate E[N(d)] on a geometric grid over the invertible range.

    The range ends at d_max = safety * C * (n K^2 C^k)^(1/beta), the scale
    past which expected counts stop concentrating. k <= 2 integrates by FFT
    convolution on a 2^11-per-axis torus grid (deterministic); k >= 3 falls
    back to fixed-seed Sobol quadrature. Raises NonMonotone if the sampled
    curve is not strictly decreasing; refine grid_m in that case.
    """
    p = params.resolved()
    n, k, beta, C, K, s = p.n, p.k, p.beta, p.C, p.K, p.s
    if math.isinf(beta):
        d_max = 2.0 * C * safety
    else:
        d_max = safety * C * (n * K * K * C ** k) ** (1.0 / beta)
    d_max = min(d_max, 0.499)
    if d_max <= 0:
        raise ValueError("empty valid range; model too sparse to calibrate")

    lo = min(C / 32.0, d_max / 256.0)
    d_grid = np.concatenate([[0.0], np.geomspace(lo, d_max, num_points - 1)])

    if k <= 2:
        m = grid_m if grid_m is not None else 2048 if k == 2 else 1 << 16
        integrals = _product_integral_fft(k, beta, C, d_grid, m)
        method = {"method": "fft", "grid_m": m}
    else:
        integrals = _product_integral_qmc(k, beta, C, d_grid)
        method = {"method": "qmc-sobol", "samples": 1 << 17}

    counts = (n - 2) * (s * s) * (K * K) * integrals
    if not np.all(np.diff(counts) < 0):
        raise NonMonotone(
            "tabulated common-neighbor curve is not strictly decreasing; "
            "refine the integration grid")
    return DistanceCalibration(model=p, d_grid=d_grid, counts=counts,
                               d_max=float(d_max), meta=method)


def estimate_distance(count: float, cal: DistanceCalibration) -> DistanceEstimate:
    """Invert the calibration curve at an observed common-neighbor count.

    Counts above E[N(0)] clamp to distance 0; counts below E[N(d_max)]
    clamp to d_max and are flagged saturated.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    if count >= cal.counts[0]:
        return DistanceEstimate(0.0, False)
    if count <= cal.counts[-1]:
        return DistanceEstimate(cal.d_max, True)
    d = float(np.interp(count, cal.counts[::-1], cal.d_grid[::-1]))
    return DistanceEstimate(d, False)


def estimate_distances(counts, cal: DistanceCalibration
                       ) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized inversion; returns (distances, saturated mask)."""
    counts = np.asarray(counts, dtype=np.float64)
    d = np.interp(counts, cal.counts[::-1], cal.d_grid[::-1])
    d = np.where(counts >= cal.counts[0], 0.0, d)
    saturated = counts <= cal.counts[-1]
    d = np.where(saturated, cal.d_max, d)
    return d, saturated


def filter_edges_geometric(g: ObservedGraph, positions: np.ndarray | None,
                           x_factor: float, C: float) -> ObservedGraph:
    """Drop every edge of torus length < x_factor * C; node set unchanged.

    Needs true positions (synthetic graphs), indexed by this graph's labels.
    """
    if positions is None:
        raise MissingPositions("geometric filtering needs node positions")
    eu, ev = g.edge_array()
    lengths = kernels.torus_lengths_for_edges(
        np.ascontiguousarray(positions, dtype=np.float64), eu, ev)
    keep = lengths >= x_factor * C
    indptr, indices = build_csr(g.n, eu[keep], ev[keep], directed=g.directed)
    return ObservedGraph(n=g.n, indptr=indptr, indices=indices,
                         directed=g.directed)


def filter_edges_nearest_k(g: ObservedGraph, k_nearest: int) -> ObservedGraph:
    """Remove each node's k_nearest highest common-neighbor edges.

    "Nearest" means most common neighbors (ties broken by lower neighbor
    id); counts come from the original graph, once. Undirected edges are
    removed when marked by either endpoint; in directed graphs each node
    ranks its out-edges and marks by tail.
    """
    if k_nearest < 0:
        raise ValueError("k_nearest must be >= 0")
    if k_nearest == 0:
        return ObservedGraph(n=g.n, indptr=g.indptr.copy(),
                             indices=g.indices.copy(), directed=g.directed)
    counts = kernels.edge_slot_common_neighbors(g.indptr, g.indices)
    marked = np.zeros(g.indices.size, dtype=bool)
    for u in range(g.n):
        lo, hi = int(g.indptr[u]), int(g.indptr[u + 1])
        if lo == hi:
            continue
        row_counts = counts[lo:hi]
        # sort by (count desc, neighbor id asc); rows are id-ascending, so a
        # stable sort on -count keeps the tie order
        order = np.argsort(-row_counts, kind="stable")[:k_nearest]
        marked[lo + order] = True

    eu, ev = [], []
    for u in range(g.n):
        lo, hi = int(g.indptr[u]), int(g.indptr[u + 1])
        for t in range(lo, hi):
            v = int(g.indices[t])
            if g.directed:
                if not marked[t]:
                    eu.append(u)
                    ev.append(v)
            else:
                if v < u:
                    continue
                # slot of the reverse direction
                row = g.indices[g.indptr[v]:g.indptr[v + 1]]
                pos = int(np.searchsorted(row, u))
                rev = int(g.indptr[v]) + pos
                if not (marked[t] or marked[rev]):
                    eu.append(u)
                    ev.append(v)
    indptr, indices = build_csr(g.n, np.array(eu, dtype=np.int64),
                                np.array(ev, dtype=np.int64),
                                directed=g.directed)
    return ObservedGraph(n=g.n, indptr=indptr, indices=indices,
                         directed=g.directed)


@dataclass
class EdgeLengthClasses:
    """Exhaustive, disjoint partition of edges by estimated length."""

    short: np.ndarray  # (m, 2) arrays of node pairs
    band: np.ndarray
    long: np.ndarray


def classify_edge_lengths(g: ObservedGraph, cal: DistanceCalibration,
                          d_L: float, d_H: float) -> EdgeLengthClasses:
    """Split edges into short (<= d_L), band (d_L, d_H], long (> d_H).

    Distances are estimated per edge from common-neighbor counts on g.
    """
    if not (0.0 <= d_L < d_H):
        raise BandRangeError(f"need 0 <= d_L < d_H, got ({d_L}, {d_H})")
    if d_H > cal.d_max * (1 + 1e-9):
        raise BandRangeError(
            f"d_H = {d_H} beyond calibrated range {cal.d_max}")
    eu, ev = g.edge_array()
    cn = np.array([kernels.pair_common_neighbors(g.indptr, g.indices, u, v)
                   for u, v in zip(eu.tolist(), ev.tolist())], dtype=np.float64)
    dist, _ = estimate_distances(cn, cal)
    pairs = np.stack([eu, ev], axis=1)
    short = pairs[dist <= d_L]
    band = pairs[(dist > d_L) & (dist <= d_H)]
    long_ = pairs[dist > d_H]
    return EdgeLengthClasses(short=short, band=band, long=long_)


def select_nodes_within(g: ObservedGraph, center: int, d_T: float,
                        cal: DistanceCalibration) -> np.ndarray:
    """Nodes whose estimated distance from ``center`` is < d_T, plus center."""
    g.check_node(center)
    counts = kernels.node_common_neighbors(g.indptr, g.indices, center, g.n)
    dist, _ = estimate_distances(counts.astype(np.float64), cal)
    sel = np.flatnonzero(dist < d_T)
    sel = sel[sel != center]
    return np.sort(np.append(sel, center)).astype(np.int64)
