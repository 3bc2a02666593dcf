"""Percolation graph matching: lazy engine, brute-force oracle, seed formula.

The matcher explores the pairs graph over two observed graphs: expanding a
matched pair [z1, z2] adds one mark to every candidate [u, v] with u adjacent
to z1 and v adjacent to z2 (out-neighbors only in directed mode). A pair is
tested for frontier admission exactly once, when its counter first reaches
the threshold r, and is discarded forever if it then conflicts with an
already matched or matchable pair.

The matching engine itself never sees the secret alignment; run_pgm scores
its output against the GraphPair afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .errors import ConflictingSeeds, InvalidNode, TooLarge
from .graphs import ObservedGraph
from .rng import splitmix64_next, stream_seed
from .sampling import GraphPair

__all__ = [
    "PgmConfig",
    "MatchState",
    "MatchResult",
    "run_pgm",
    "run_pgm_bruteforce",
    "critical_seed_size",
    "score_matches",
]

BRUTEFORCE_MAX_N = 200


@dataclass(frozen=True)
class PgmConfig:
    """Knobs for a matching run.

    ``edge_filter`` is a provenance label for the filter applied to the
    observed graphs upstream (it does not alter the engine). ``candidate_masks``
    restricts the pair space to the imperfect pairs graph built by the staged
    procedures: a pair [u, v] participates iff
    (strict1[u] and loose2[v]) or (strict2[v] and loose1[u]).
    """

    r: int = 5
    directed: bool = False
    edge_filter: str | None = None
    max_steps: int | None = None
    candidate_masks: tuple | None = None  # (strict1, loose1, strict2, loose2)
    record_trace: bool = False
    include_seeds_in_score: bool = False

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("mark threshold r must be >= 1")


@dataclass
class MatchState:
    """Explicit matcher state (materialized by the brute-force oracle)."""

    t: int
    matched: list
    frontier: list
    counters: dict
    used1: np.ndarray
    used2: np.ndarray


@dataclass
class MatchResult:
    """Outcome of one matching run, scored against the secret alignment."""

    matched_pairs: list
    seed_count: int
    good_count: int
    bad_count: int
    error_ratio: float
    steps: int
    rng_seed: int | None = None
    frontier_trace: np.ndarray | None = None
    stats: dict = field(default_factory=dict)

    @property
    def total_matched(self) -> int:
        return len(self.matched_pairs)


def _validate_seeds(seeds, n1: int, n2: int) -> tuple[np.ndarray, np.ndarray]:
    seeds = list(seeds)
    s1 = np.array([p[0] for p in seeds], dtype=np.int64)
    s2 = np.array([p[1] for p in seeds], dtype=np.int64)
    if s1.size:
        if s1.min() < 0 or s1.max() >= n1 or s2.min() < 0 or s2.max() >= n2:
            raise InvalidNode("seed pair references a node outside the graphs")
        if len(np.unique(s1)) != s1.size or len(np.unique(s2)) != s2.size:
            raise ConflictingSeeds("seed pairs share a coordinate")
    return s1, s2


def _masks_arrays(config: PgmConfig, n1: int, n2: int):
    if config.candidate_masks is None:
        empty = np.zeros(0, dtype=np.bool_)
        return False, empty, empty, empty, empty
    strict1, loose1, strict2, loose2 = config.candidate_masks
    strict1 = np.asarray(strict1, dtype=np.bool_)
    loose1 = np.asarray(loose1, dtype=np.bool_)
    strict2 = np.asarray(strict2, dtype=np.bool_)
    loose2 = np.asarray(loose2, dtype=np.bool_)
    if strict1.size != n1 or loose1.size != n1:
        raise ValueError("g1 candidate masks must have length n1")
    if strict2.size != n2 or loose2.size != n2:
        raise ValueError("g2 candidate masks must have length n2")
    return True, strict1, loose1, strict2, loose2


def score_matches(pair: GraphPair, matched1, matched2, seed_count: int,
                  include_seeds: bool = False) -> tuple[int, int, float]:
    """(good, bad, error_ratio) for a matched sequence; seeds lead the list.

    Seeds are given, not found, so by default they are excluded from the
    scores; error_ratio is bad / (good + bad), 0 when nothing was scored.
    """
    m1 = np.asarray(matched1, dtype=np.int64)
    m2 = np.asarray(matched2, dtype=np.int64)
    good_mask = pair.alignment[m2] == m1
    start = 0 if include_seeds else seed_count
    good = int(np.count_nonzero(good_mask[start:]))
    bad = int(good_mask.size - start - good)
    total = good + bad
    return good, bad, (bad / total if total else 0.0)


def _mark_adjacency(g: ObservedGraph, config: PgmConfig):
    # directed mode propagates marks along out-edges, which is exactly the
    # stored CSR; undirected CSR already holds both directions
    return g.indptr, g.indices


def run_pgm(pair: GraphPair, seeds, config: PgmConfig,
            rng: np.random.Generator) -> MatchResult:
    """Percolation matching on the lazily explored pairs graph.

    One uniform frontier draw per step (splitmix64 stream seeded from
    ``rng``), deterministic admission order, scores computed only after the
    matcher finishes.
    """
    g1, g2 = pair.g1, pair.g2
    s1, s2 = _validate_seeds(seeds, g1.n, g2.n)
    use_masks, strict1, loose1, strict2, loose2 = _masks_arrays(config, g1.n, g2.n)
    indptr1, indices1 = _mark_adjacency(g1, config)
    indptr2, indices2 = _mark_adjacency(g2, config)
    max_steps = config.max_steps if config.max_steps is not None else min(g1.n, g2.n)
    seed_state = stream_seed(rng)

    m1, m2, steps, trace = kernels.pgm_lazy(
        indptr1, indices1, indptr2, indices2, g1.n, g2.n,
        s1, s2, config.r, max_steps, np.uint64(seed_state),
        use_masks, strict1, loose1, strict2, loose2, config.record_trace)

    good, bad, err = score_matches(pair, m1, m2, s1.size,
                                   config.include_seeds_in_score)
    return MatchResult(
        matched_pairs=list(zip(m1.tolist(), m2.tolist())),
        seed_count=int(s1.size),
        good_count=good,
        bad_count=bad,
        error_ratio=err,
        steps=int(steps),
        rng_seed=int(seed_state),
        frontier_trace=trace if config.record_trace else None,
    )


def run_pgm_bruteforce(pair: GraphPair, seeds, config: PgmConfig,
                       rng: np.random.Generator) -> MatchResult:
    """Same algorithm with the full pairs graph materialized eagerly.

    Counters live in a dense n1 x n2 matrix and marks are applied by matrix
    blocks. Consumes the splitmix64 stream in the same order as run_pgm, so
    with a shared rng the matched sequences agree exactly. Testing oracle;
    refuses n > 200.
    """
    g1, g2 = pair.g1, pair.g2
    if max(g1.n, g2.n) > BRUTEFORCE_MAX_N:
        raise TooLarge(f"brute-force path capped at n = {BRUTEFORCE_MAX_N}")
    s1, s2 = _validate_seeds(seeds, g1.n, g2.n)
    use_masks, strict1, loose1, strict2, loose2 = _masks_arrays(config, g1.n, g2.n)
    n1, n2 = g1.n, g2.n

    adj1 = np.zeros((n1, n1), dtype=bool)
    for u in range(n1):
        adj1[u, g1.neighbors(u)] = True
    adj2 = np.zeros((n2, n2), dtype=bool)
    for u in range(n2):
        adj2[u, g2.neighbors(u)] = True

    if use_masks:
        allowed = (strict1[:, None] & loose2[None, :]) | \
                  (loose1[:, None] & strict2[None, :])
    else:
        allowed = np.ones((n1, n2), dtype=bool)

    counters = np.zeros((n1, n2), dtype=np.int32)
    used1 = np.zeros(n1, dtype=bool)
    used2 = np.zeros(n2, dtype=bool)
    frontier: list[tuple[int, int]] = []
    for a, b in zip(s1.tolist(), s2.tolist()):
        frontier.append((a, b))
        used1[a] = True
        used2[b] = True

    state = MatchState(t=0, matched=[], frontier=frontier, counters={},
                       used1=used1, used2=used2)
    max_steps = config.max_steps if config.max_steps is not None else min(n1, n2)
    seed_state = stream_seed(rng)
    sm_state = seed_state
    trace = []

    while state.frontier and state.t < max_steps:
        sm_state, z = splitmix64_next(sm_state)
        idx = z % len(state.frontier)
        z1, z2 = state.frontier[idx]
        state.frontier[idx] = state.frontier[-1]
        state.frontier.pop()
        state.matched.append((z1, z2))
        state.t += 1

        nbrs1 = np.where(adj1[z1])[0]
        nbrs2 = np.where(adj2[z2])[0]
        if nbrs1.size and nbrs2.size:
            block = np.ix_(nbrs1, nbrs2)
            bump = allowed[block].astype(np.int32)
            counters[block] += bump
            crossed = (counters[block] == config.r) & (bump == 1)
            rows, cols = np.nonzero(crossed)
            for row, col in zip(rows.tolist(), cols.tolist()):
                u = int(nbrs1[row])
                v = int(nbrs2[col])
                if not state.used1[u] and not state.used2[v]:
                    state.used1[u] = True
                    state.used2[v] = True
                    state.frontier.append((u, v))
        trace.append(len(state.frontier))

    m1 = np.array([p[0] for p in state.matched], dtype=np.int64)
    m2 = np.array([p[1] for p in state.matched], dtype=np.int64)
    good, bad, err = score_matches(pair, m1, m2, s1.size,
                                   config.include_seeds_in_score)
    state.counters = {(int(i), int(j)): int(counters[i, j])
                      for i, j in zip(*np.nonzero(counters))}
    return MatchResult(
        matched_pairs=state.matched,
        seed_count=int(s1.size),
        good_count=good,
        bad_count=bad,
        error_ratio=err,
        steps=state.t,
        rng_seed=int(seed_state),
        frontier_trace=(np.array(trace, dtype=np.int64)
                        if config.record_trace else None),
        stats={"final_state": state},
    )


def critical_seed_size(m: float, p: float, s: float, r: int) -> float:
    """Critical seed count (1 - 1/r) * ((r-1)! / (m (p s^2)^r))^(1/(r-1)).

    Evaluated in log space so large r neither overflows the factorial nor
    underflows (p s^2)^r.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if not 0.0 < p <= 1.0:
        raise ValueError("p must lie in (0, 1]")
    if not 0.0 < s <= 1.0:
        raise ValueError("s must lie in (0, 1]")
    if r < 2:
        raise ValueError("threshold r must be >= 2")
    log_inner = math.lgamma(r) - math.log(m) - r * math.log(p * s * s)
    return (1.0 - 1.0 / r) * math.exp(log_inner / (r - 1))
