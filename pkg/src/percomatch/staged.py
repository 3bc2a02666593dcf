"""Staged de-anonymization pipelines for the two clustering regimes.

Sparse clusters: classify nodes by seed-neighbor counts at two thresholds,
match the resulting restricted pair space by percolation, then grow the
matched region ring by ring with a proximity threshold derived from the
lens area between the matched bulk and a candidate's plateau ball.

Dense clusters: extract two separated regions, run bipartite percolation
using only cross-region edges, finish the larger side by threshold
matching, then hop outward along band-length edges classified through the
common-neighbor distance estimator.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.stats import qmc

from . import kernels
from .bounds import tail_bounds  # noqa: F401  (part of this module's surface)
from .errors import EmptyBulk, MonotonicityViolation, RegimeWarning
from .estimation import (DistanceCalibration, build_distance_calibration,
                         classify_edge_lengths, estimate_distances,
                         select_nodes_within)
from .geometry import ModelParams, plateau_inverse, profile
from .graphs import ObservedGraph
from .pgm import MatchResult, PgmConfig, run_pgm, score_matches, _validate_seeds
from .rng import stream_seed
from .sampling import GraphPair

__all__ = [
    "StagedConfig",
    "RegionSpec",
    "RegionGeometry",
    "classify_by_seed_count",
    "build_restricted_pairs",
    "RestrictedPairs",
    "lens_area",
    "ring_expand",
    "bipartite_pgm",
    "threshold_match_rhs",
    "sparse_deanonymize",
    "dense_deanonymize",
    "dense_region_geometry",
    "tail_bounds",
]


@dataclass(frozen=True)
class StagedConfig:
    """Thresholds and knobs shared by the staged pipelines.

    alpha1 > alpha2 are the strict/loose classification thresholds; delta is
    the classification slack with alpha1 * (1 + delta) <= 1; alpha_exp is the
    bipartite density exponent in (3.5, 4); lambda_band scales d_H = lambda *
    d_L; ring_step defaults to C/2. ring_threshold_scale multiplies the lens
    threshold (the stated constant is kept at 1.0).
    """

    alpha1: float = 0.6
    alpha2: float = 0.3
    delta: float = 0.5
    r: int = 4
    alpha_exp: float = 3.75
    lambda_band: float = 2.0
    ring_step: float | None = None
    ring_threshold_scale: float = 1.0
    d_t_factor: float = 1.0
    stall_fraction: float = 0.005
    stall_rounds: int = 2

    def __post_init__(self):
        if not self.alpha1 > self.alpha2 > 0:
            raise ValueError("need alpha1 > alpha2 > 0")
        if not 0 < self.delta <= 1:
            raise ValueError("need delta in (0, 1]")
        if self.alpha1 * (1 + self.delta) > 1 + 1e-12:
            raise ValueError("need alpha1 * (1 + delta) <= 1")
        if not 3.5 < self.alpha_exp < 4.0:
            raise ValueError("need alpha_exp in (3.5, 4)")
        if self.lambda_band <= 1:
            raise ValueError("need lambda_band > 1")
        if self.r < 1:
            raise ValueError("need r >= 1")


@dataclass(frozen=True)
class RegionSpec:
    """A ball or axis-aligned cube on the torus, with its pipeline role."""

    center: np.ndarray
    shape: str          # "ball" | "cube"
    size: float         # radius or side
    role: str = ""      # inner | intermediate | outer | left | right

    def __post_init__(self):
        if self.shape not in ("ball", "cube"):
            raise ValueError("shape must be 'ball' or 'cube'")
        if self.size <= 0:
            raise ValueError("region size must be positive")

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        diff = np.abs(pts - np.asarray(self.center, dtype=np.float64))
        diff = np.minimum(diff, 1.0 - diff)
        if self.shape == "ball":
            return np.sqrt(np.sum(diff * diff, axis=1)) <= self.size
        return np.all(diff <= self.size / 2.0, axis=1)


def classify_by_seed_count(g: ObservedGraph, seeds, alpha: float,
                           params: ModelParams) -> np.ndarray:
    """Accept node i iff its seed-neighbor count exceeds alpha * s * K * a0."""
    p = params.resolved()
    seeds = np.asarray(list(seeds), dtype=np.int64)
    for sigma in seeds:
        g.check_node(int(sigma))
    threshold = alpha * p.s * p.K * seeds.size
    counts = np.zeros(g.n, dtype=np.int64)
    for sigma in seeds:
        counts[g.neighbors(int(sigma))] += 1
    return np.flatnonzero(counts > threshold).astype(np.int64)


@dataclass
class RestrictedPairs:
    """Imperfect pairs graph: [i1, j2] is admitted iff one node passed the
    strict classification and the other at least the loose one."""

    strict1: np.ndarray
    loose1: np.ndarray
    strict2: np.ndarray
    loose2: np.ndarray

    def admits(self, i1: int, j2: int) -> bool:
        return bool((self.strict1[i1] and self.loose2[j2])
                    or (self.strict2[j2] and self.loose1[i1]))

    @property
    def masks(self) -> tuple:
        return (self.strict1, self.loose1, self.strict2, self.loose2)


def _as_mask(ids_or_mask, n: int) -> np.ndarray:
    arr = np.asarray(ids_or_mask)
    if arr.dtype == np.bool_:
        if arr.size != n:
            raise ValueError("mask length mismatch")
        return arr.copy()
    mask = np.zeros(n, dtype=np.bool_)
    mask[arr.astype(np.int64)] = True
    return mask


def build_restricted_pairs(acc1_strict, acc1_loose, acc2_strict, acc2_loose,
                           n: int) -> RestrictedPairs:
    """Candidate-pair predicate from the two-threshold classification.

    Raises MonotonicityViolation unless each strict set is contained in the
    matching loose set (alpha1 > alpha2 guarantees this when both come from
    classify_by_seed_count on the same graph).
    """
    s1 = _as_mask(acc1_strict, n)
    l1 = _as_mask(acc1_loose, n)
    s2 = _as_mask(acc2_strict, n)
    l2 = _as_mask(acc2_loose, n)
    if np.any(s1 & ~l1) or np.any(s2 & ~l2):
        raise MonotonicityViolation("strict acceptance set not inside loose set")
    return RestrictedPairs(strict1=s1, loose1=l1, strict2=s2, loose2=l2)


# ---------------------------------------------------------------------------
# Ring expansion
# ---------------------------------------------------------------------------

def lens_area(R: float, r: float, D: float, k: int = 2) -> float:
    """Volume of the intersection of balls of radii R and r at center
    distance D. Analytic for k = 2; fixed-seed quasi-random integration
    otherwise."""
    if D >= R + r:
        return 0.0
    if D <= abs(R - r):
        small = min(R, r)
        return (math.pi * small * small if k == 2
                else _ball_volume_k(k) * small ** k)
    if k == 2:
        d1 = (D * D + R * R - r * r) / (2.0 * D)
        d2 = D - d1
        seg1 = R * R * math.acos(max(-1.0, min(1.0, d1 / R))) \
            - d1 * math.sqrt(max(0.0, R * R - d1 * d1))
        seg2 = r * r * math.acos(max(-1.0, min(1.0, d2 / r))) \
            - d2 * math.sqrt(max(0.0, r * r - d2 * d2))
        return seg1 + seg2
    sampler = qmc.Sobol(d=k, scramble=True, seed=777)
    pts = (sampler.random_base2(m=16) - 0.5) * (2.0 * r)  # cube around small ball
    center_small = np.zeros(k)
    center_small[0] = D
    inside_small = np.sum(pts * pts, axis=1) <= r * r
    shifted = pts + center_small
    inside_big = np.sum(shifted * shifted, axis=1) <= R * R
    frac = np.mean(inside_small & inside_big)
    return float(frac) * (2.0 * r) ** k


def _ball_volume_k(k: int) -> float:
    return math.pi ** (k / 2.0) / math.gamma(k / 2.0 + 1.0)


def _greedy_conflict_free(cand_u, cand_v, cand_c, used1, used2):
    """Admit candidates by descending support, ties by (u, v); returns pairs."""
    order = np.lexsort((cand_v, cand_u, -cand_c))
    out = []
    for t in order:
        u = int(cand_u[t])
        v = int(cand_v[t])
        if not used1[u] and not used2[v]:
            used1[u] = True
            used2[v] = True
            out.append((u, v))
    return out


def _new_support_map():
    keys = np.full(1 << 12, -1, dtype=np.int64)
    vals = np.zeros(1 << 12, dtype=np.int32)
    return keys, vals, 0


def ring_expand(pair: GraphPair, matched, rho: float, params: ModelParams,
                ring_step: float | None = None,
                threshold_scale: float = 1.0) -> list:
    """One proximity-matching round growing the bulk by half a plateau.

    The threshold is r = n/2 * |lens| * K/2 (tunable by threshold_scale),
    with the lens taken between the bulk D(0, rho) and a plateau ball at
    distance rho + step. Candidates with at least r pairs-graph neighbors
    among ``matched`` are admitted greedily by descending support.
    """
    p = params.resolved()
    if rho < p.C:
        raise EmptyBulk(f"bulk radius {rho} below plateau radius {p.C}")
    matched = list(matched)
    if not matched:
        return []
    step = ring_step if ring_step is not None else p.C / 2.0
    lens = lens_area(rho, p.C, rho + step, k=p.k)
    r_thr = threshold_scale * p.n * lens * p.K / 4.0

    m1 = np.array([q[0] for q in matched], dtype=np.int64)
    m2 = np.array([q[1] for q in matched], dtype=np.int64)
    keys, vals, filled = _new_support_map()
    keys, vals, filled = kernels.add_pair_support(
        keys, vals, filled, pair.g1.indptr, pair.g1.indices,
        pair.g2.indptr, pair.g2.indices, pair.g2.n, m1, m2)
    cu, cv, cc = kernels.collect_support_at_least(keys, vals, pair.g2.n,
                                                  max(r_thr, 1.0))
    used1 = np.zeros(pair.g1.n, dtype=bool)
    used2 = np.zeros(pair.g2.n, dtype=bool)
    used1[m1] = True
    used2[m2] = True
    return _greedy_conflict_free(cu, cv, cc, used1, used2)


# ---------------------------------------------------------------------------
# Bipartite percolation and threshold matching
# ---------------------------------------------------------------------------

def _side_masks(side, n: int) -> tuple:
    """Normalize a side spec to (strict1, loose1, strict2, loose2) masks.

    Accepts one node set (same in both graphs), a (set_g1, set_g2) tuple,
    or a full four-mask restriction."""
    if isinstance(side, RestrictedPairs):
        return side.masks
    if isinstance(side, tuple) and len(side) == 4:
        return tuple(np.asarray(m, dtype=np.bool_) for m in side)
    if isinstance(side, tuple) and len(side) == 2:
        m1 = _as_mask(side[0], n)
        m2 = _as_mask(side[1], n)
        return (m1, m1.copy(), m2, m2.copy())
    m = _as_mask(side, n)
    return (m, m.copy(), m.copy(), m.copy())


def bipartite_pgm(pair: GraphPair, left, right, seedsL, seedsR,
                  config: PgmConfig, rng: np.random.Generator) -> MatchResult:
    """Percolation restricted to cross-side edges between two node sets.

    Per iteration one frontier pair is drawn from each side (single-side
    draws once a frontier empties); marks from a left expansion accrue only
    to right-side pairs and vice versa. stats carries the mark accounting
    and the per-match side labels.
    """
    n = pair.n
    inL1, outL1, inL2, outL2 = _side_masks(left, n)
    inR1, outR1, inR2, outR2 = _side_masks(right, n)
    if np.any(outL1 & outR1) or np.any(outL2 & outR2):
        raise ValueError("left and right node sets must be disjoint")
    sL1, sL2 = _validate_seeds(seedsL, n, n)
    sR1, sR2 = _validate_seeds(seedsR, n, n)
    both1 = np.concatenate([sL1, sR1])
    both2 = np.concatenate([sL2, sR2])
    if len(np.unique(both1)) != both1.size or len(np.unique(both2)) != both2.size:
        raise ValueError("seed pairs collide across the two sides")

    max_steps = config.max_steps if config.max_steps is not None else n
    seed_state = stream_seed(rng)
    (m1, m2, mside, steps, cross_marks, same_candidates,
     same_marks) = kernels.pgm_bipartite(
        pair.g1.indptr, pair.g1.indices, pair.g2.indptr, pair.g2.indices,
        n, n, sL1, sL2, sR1, sR2, config.r, max_steps, np.uint64(seed_state),
        inL1, outL1, inL2, outL2, inR1, outR1, inR2, outR2)

    seed_count = int(sL1.size + sR1.size)
    good, bad, err = score_matches(pair, m1, m2, seed_count,
                                   config.include_seeds_in_score)
    return MatchResult(
        matched_pairs=list(zip(m1.tolist(), m2.tolist())),
        seed_count=seed_count,
        good_count=good,
        bad_count=bad,
        error_ratio=err,
        steps=int(steps),
        rng_seed=int(seed_state),
        stats={
            "matched_side": mside,
            "cross_marks": int(cross_marks),
            "same_side_candidates": int(same_candidates),
            "same_side_marks": int(same_marks),
        },
    )


def threshold_match_rhs(pair: GraphPair, matchedL, candidatesR, p_min: float,
                        config: PgmConfig) -> list:
    """Match every conflict-free RHS pair with >= a0 * p_min / 2 adjacent
    matched LHS pairs, greedily by descending support.

    ``candidatesR`` is either an iterable of (u, v) pairs or a
    (mask_g1, mask_g2) tuple describing the admissible product set.
    """
    if not 0.0 < p_min < 1.0:
        raise ValueError("p_min must lie in (0, 1)")
    matchedL = list(matchedL)
    if not matchedL:
        return []
    a0 = len(matchedL)
    r_thr = a0 * p_min / 2.0

    n2 = pair.g2.n
    m1 = np.array([q[0] for q in matchedL], dtype=np.int64)
    m2 = np.array([q[1] for q in matchedL], dtype=np.int64)
    keys, vals, filled = _new_support_map()
    keys, vals, filled = kernels.add_pair_support(
        keys, vals, filled, pair.g1.indptr, pair.g1.indices,
        pair.g2.indptr, pair.g2.indices, n2, m1, m2)
    cu, cv, cc = kernels.collect_support_at_least(keys, vals, n2,
                                                  max(r_thr, 1.0))

    if isinstance(candidatesR, tuple) and len(candidatesR) == 2:
        mask1 = _as_mask(candidatesR[0], pair.g1.n)
        mask2 = _as_mask(candidatesR[1], n2)
        keep = mask1[cu] & mask2[cv]
    else:
        cand = {(int(u), int(v)) for u, v in candidatesR}
        keep = np.array([(int(u), int(v)) in cand
                         for u, v in zip(cu, cv)], dtype=bool)
    cu, cv, cc = cu[keep], cv[keep], cc[keep]

    used1 = np.zeros(pair.g1.n, dtype=bool)
    used2 = np.zeros(n2, dtype=bool)
    used1[m1] = True
    used2[m2] = True
    return _greedy_conflict_free(cu, cv, cc, used1, used2)


# ---------------------------------------------------------------------------
# End-to-end pipelines
# ---------------------------------------------------------------------------

def _params_from_pair(pair: GraphPair) -> ModelParams:
    model = pair.source_meta.get("truth_meta", {}).get("model")
    if not model or model.get("C") is None:
        raise ValueError("pipeline needs ModelParams; pass params explicitly")
    return ModelParams.from_dict(model)


def sparse_deanonymize(pair: GraphPair, compact_seeds, config: StagedConfig,
                       rng: np.random.Generator,
                       params: ModelParams | None = None) -> MatchResult:
    """Sparse-cluster pipeline: classify, restricted PGM, ring expansion.

    Seeds must form a compact set (mutual distance of plateau order).
    Returns an aggregated MatchResult; stats["progress"] holds one
    (round, region, candidates, matched_good, matched_bad) row per stage.
    """
    p = (params or _params_from_pair(pair)).resolved()
    seeds = list(compact_seeds)
    seeds1 = [q[0] for q in seeds]
    seeds2 = [q[1] for q in seeds]

    acc1_strict = classify_by_seed_count(pair.g1, seeds1, config.alpha1, p)
    acc1_loose = classify_by_seed_count(pair.g1, seeds1, config.alpha2, p)
    acc2_strict = classify_by_seed_count(pair.g2, seeds2, config.alpha1, p)
    acc2_loose = classify_by_seed_count(pair.g2, seeds2, config.alpha2, p)
    restricted = build_restricted_pairs(acc1_strict, acc1_loose,
                                        acc2_strict, acc2_loose, p.n)

    pgm_config = PgmConfig(r=config.r, candidate_masks=restricted.masks)
    base = run_pgm(pair, seeds, pgm_config, rng)
    matched = list(base.matched_pairs)
    progress = []
    g0, b0, _ = score_matches(pair, [q[0] for q in matched],
                              [q[1] for q in matched], len(seeds))
    progress.append((0, "restricted-pgm", len(matched), g0, b0))

    used1 = np.zeros(pair.g1.n, dtype=bool)
    used2 = np.zeros(pair.g2.n, dtype=bool)
    for u, v in matched:
        used1[u] = True
        used2[v] = True

    step = config.ring_step if config.ring_step is not None else p.C / 2.0
    rho = max(p.C, plateau_inverse(min(1.0, (1 + config.delta) * config.alpha2),
                                   p.C, p.beta))
    rho_cap = 0.5 * math.sqrt(p.k) + p.C

    keys, vals, filled = _new_support_map()
    fresh1 = np.array([q[0] for q in matched], dtype=np.int64)
    fresh2 = np.array([q[1] for q in matched], dtype=np.int64)
    stall = 0
    round_no = 0
    while stall < config.stall_rounds and rho <= rho_cap:
        round_no += 1
        if fresh1.size:
            keys, vals, filled = kernels.add_pair_support(
                keys, vals, filled, pair.g1.indptr, pair.g1.indices,
                pair.g2.indptr, pair.g2.indices, pair.g2.n, fresh1, fresh2)
        lens = lens_area(rho, p.C, rho + step, k=p.k)
        r_thr = config.ring_threshold_scale * p.n * lens * p.K / 4.0
        cu, cv, cc = kernels.collect_support_at_least(
            keys, vals, pair.g2.n, max(r_thr, 1.0))
        new_pairs = _greedy_conflict_free(cu, cv, cc, used1, used2)
        matched.extend(new_pairs)
        fresh1 = np.array([q[0] for q in new_pairs], dtype=np.int64)
        fresh2 = np.array([q[1] for q in new_pairs], dtype=np.int64)
        gd, bd, _ = score_matches(pair, fresh1, fresh2, 0)
        progress.append((round_no, f"ring(rho={rho:.4f})", int(cu.size), gd, bd))
        stall = stall + 1 if not new_pairs else 0
        rho += step

    m1 = np.array([q[0] for q in matched], dtype=np.int64)
    m2 = np.array([q[1] for q in matched], dtype=np.int64)
    good, bad, err = score_matches(pair, m1, m2, len(seeds))
    return MatchResult(
        matched_pairs=matched,
        seed_count=len(seeds),
        good_count=good,
        bad_count=bad,
        error_ratio=err,
        steps=base.steps,
        rng_seed=base.rng_seed,
        stats={"progress": progress, "rounds": round_no},
    )


@dataclass(frozen=True)
class RegionGeometry:
    """Derived dense-regime geometry: region side h, separation g, and the
    induced cross-region edge probability range."""

    h: float
    g: float
    p_min: float
    p_max: float
    m: float
    p_max_target: float


def dense_region_geometry(params: ModelParams,
                          config: StagedConfig) -> RegionGeometry:
    """Pick h = C and solve the separation g from p_max = m^(-alpha/r)."""
    p = params.resolved()
    h = p.C
    m = p.n * h ** p.k
    p_max_target = m ** (-config.alpha_exp / config.r)
    g = plateau_inverse(min(1.0, p_max_target / p.K), p.C, p.beta)
    p_max = p.K * float(profile(g, p.C, p.beta))
    p_min = p.K * float(profile(g + math.sqrt(p.k) * h, p.C, p.beta))
    return RegionGeometry(h=h, g=g, p_min=p_min, p_max=p_max, m=m,
                          p_max_target=p_max_target)


def dense_deanonymize(pair: GraphPair, seed_regions, config: StagedConfig,
                      rng: np.random.Generator,
                      params: ModelParams | None = None,
                      cal: DistanceCalibration | None = None,
                      p_min: float | None = None) -> MatchResult:
    """Dense-cluster pipeline: region extraction, bipartite PGM, threshold
    matching, then band-edge expansion rounds until coverage stalls.

    ``seed_regions`` is a (seedsL, seedsR) tuple of good-pair lists, one
    compact group per region. Emits RegimeWarning when K < 0.5.
    """
    p = (params or _params_from_pair(pair)).resolved()
    if p.K < 0.5:
        warnings.warn("dense pipeline invoked with K < 0.5", RegimeWarning)
    seedsL, seedsR = seed_regions
    seedsL = list(seedsL)
    seedsR = list(seedsR)
    geo = dense_region_geometry(params=p, config=config)
    effective_p_min = p_min if p_min is not None else geo.p_min

    def _classify_side(seeds):
        s1 = [q[0] for q in seeds]
        s2 = [q[1] for q in seeds]
        strict1 = classify_by_seed_count(pair.g1, s1, config.alpha1, p)
        loose1 = classify_by_seed_count(pair.g1, s1, config.alpha2, p)
        strict2 = classify_by_seed_count(pair.g2, s2, config.alpha1, p)
        loose2 = classify_by_seed_count(pair.g2, s2, config.alpha2, p)
        return build_restricted_pairs(strict1, loose1, strict2, loose2, p.n)

    left = _classify_side(seedsL)
    right = _classify_side(seedsR)
    # regions must be disjoint for the bipartite engine; drop overlap
    both1 = left.loose1 & right.loose1
    both2 = left.loose2 & right.loose2
    for side in (left, right):
        side.strict1 &= ~both1
        side.loose1 &= ~both1
        side.strict2 &= ~both2
        side.loose2 &= ~both2

    pgm_config = PgmConfig(r=config.r)
    base = bipartite_pgm(pair, left, right, seedsL, seedsR, pgm_config, rng)
    matched = list(base.matched_pairs)
    seed_count = len(seedsL) + len(seedsR)
    progress = []
    g0, b0, _ = score_matches(pair, [q[0] for q in matched],
                              [q[1] for q in matched], seed_count)
    progress.append((0, "bipartite-pgm", len(matched), g0, b0))

    # finish the larger side by threshold matching from the smaller one
    msides = base.stats["matched_side"]
    left_matched = [matched[t] for t in range(len(matched)) if msides[t] == 0]
    right_matched = [matched[t] for t in range(len(matched)) if msides[t] == 1]
    sizeL = int(np.count_nonzero(left.loose1))
    sizeR = int(np.count_nonzero(right.loose1))
    if sizeL <= sizeR:
        donor, target = left_matched, right
    else:
        donor, target = right_matched, left
    if donor:
        extra = threshold_match_rhs(pair, donor, (target.loose1, target.loose2),
                                    effective_p_min, pgm_config)
        taken1 = {q[0] for q in matched}
        taken2 = {q[1] for q in matched}
        extra = [q for q in extra if q[0] not in taken1 and q[1] not in taken2]
        matched.extend(extra)
        ge, be, _ = score_matches(pair, [q[0] for q in extra],
                                  [q[1] for q in extra], 0)
        progress.append((0, "threshold-rhs", len(extra), ge, be))

    # band-edge expansion rounds
    calibration = cal if cal is not None else build_distance_calibration(p)
    d_L = max(p.C, p.C * math.log(max(p.n ** (1.0 / p.k) * p.C, 1.0 + 1e-9)))
    d_H = min(config.lambda_band * d_L, calibration.d_max * 0.999)
    d_T = config.d_t_factor * p.C
    p_min_band = p.K * float(profile(d_H, p.C, p.beta))

    used1 = np.zeros(pair.g1.n, dtype=bool)
    used2 = np.zeros(pair.g2.n, dtype=bool)
    for u, v in matched:
        used1[u] = True
        used2[v] = True

    explored = set()
    stall = 0
    round_no = 0
    max_rounds = 4 * int(1.0 / p.C) + 8
    while stall < config.stall_rounds and round_no < max_rounds and d_L < d_H:
        center = None
        for q in matched:
            if q not in explored:
                center = q
                break
        if center is None:
            break
        explored.add(center)
        round_no += 1

        group1 = select_nodes_within(pair.g1, center[0], d_T, calibration)
        group2 = select_nodes_within(pair.g2, center[1], d_T, calibration)
        gset1 = set(group1.tolist())
        gset2 = set(group2.tolist())
        group_pairs = [q for q in matched if q[0] in gset1 and q[1] in gset2]
        if not group_pairs:
            stall += 1
            continue

        # nodes reached from the group through band-length edges
        rhs1 = _band_targets(pair.g1, [q[0] for q in group_pairs],
                             calibration, d_L, d_H)
        rhs2 = _band_targets(pair.g2, [q[1] for q in group_pairs],
                             calibration, d_L, d_H)
        rhs1 &= ~used1
        rhs2 &= ~used2
        n_candidates = int(np.count_nonzero(rhs1)) * int(np.count_nonzero(rhs2))
        if n_candidates == 0:
            stall += 1
            progress.append((round_no, "band", 0, 0, 0))
            continue
        new_pairs = threshold_match_rhs(pair, group_pairs, (rhs1, rhs2),
                                        p_min_band, pgm_config)
        new_pairs = [q for q in new_pairs
                     if not used1[q[0]] and not used2[q[1]]]
        for u, v in new_pairs:
            used1[u] = True
            used2[v] = True
        matched.extend(new_pairs)
        gd, bd, _ = score_matches(pair, [q[0] for q in new_pairs],
                                  [q[1] for q in new_pairs], 0)
        progress.append((round_no, "band", n_candidates, gd, bd))
        grown = len(new_pairs) >= config.stall_fraction * max(len(matched), 1)
        stall = 0 if grown else stall + 1

    m1 = np.array([q[0] for q in matched], dtype=np.int64)
    m2 = np.array([q[1] for q in matched], dtype=np.int64)
    good, bad, err = score_matches(pair, m1, m2, seed_count)
    return MatchResult(
        matched_pairs=matched,
        seed_count=seed_count,
        good_count=good,
        bad_count=bad,
        error_ratio=err,
        steps=base.steps,
        rng_seed=base.rng_seed,
        stats={"progress": progress, "rounds": round_no,
               "geometry": geo, "d_L": d_L, "d_H": d_H},
    )


def _band_targets(g: ObservedGraph, group_nodes, cal: DistanceCalibration,
                  d_L: float, d_H: float) -> np.ndarray:
    """Mask of nodes joined to the group by a band-length edge."""
    mask = np.zeros(g.n, dtype=bool)
    group = np.asarray(list(group_nodes), dtype=np.int64)
    for u in group.tolist():
        nbrs = g.neighbors(u)
        if nbrs.size == 0:
            continue
        counts = np.array([kernels.pair_common_neighbors(g.indptr, g.indices,
                                                         u, int(v))
                           for v in nbrs], dtype=np.float64)
        dist, _ = estimate_distances(counts, cal)
        mask[nbrs[(dist > d_L) & (dist <= d_H)]] = True
    mask[group] = False
    return mask
