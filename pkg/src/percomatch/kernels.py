"""Numba kernels for the hot loops.

Everything here works on flat numpy arrays (CSR adjacency, open-addressing
hash maps keyed by i1 * n2 + j2) so the percolation loop runs at native
speed. Randomness inside kernels comes from a splitmix64 stream seeded once
per call; the Python mirror lives in rng.py and a test pins bit-equality.
"""

from __future__ import annotations

import numpy as np
from numba import njit

U64 = np.uint64
_GAMMA = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53


@njit(inline="always")
def _sm64(state):
    state = state + _GAMMA
    z = state
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    z = z ^ (z >> U64(31))
    return state, z


@njit(cache=True)
def splitmix_sequence(seed, count):
    """First ``count`` outputs of the stream (for cross-checking rng.py)."""
    out = np.empty(count, dtype=np.uint64)
    state = U64(seed)
    for i in range(count):
        state, z = _sm64(state)
        out[i] = z
    return out


@njit(inline="always")
def _u01(state):
    state, z = _sm64(state)
    return state, (z >> U64(11)) * _INV53


@njit(inline="always")
def _hash_slot(key, mask):
    z = U64(key) * _GAMMA
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    z = z ^ (z >> U64(31))
    return np.int64(z & U64(mask))


@njit(cache=True)
def _map_grow(keys, vals):
    oldcap = keys.shape[0]
    newcap = oldcap * 2
    nkeys = np.full(newcap, -1, dtype=np.int64)
    nvals = np.zeros(newcap, dtype=np.int32)
    nmask = newcap - 1
    for t in range(oldcap):
        kk = keys[t]
        if kk != -1:
            h = _hash_slot(kk, nmask)
            while nkeys[h] != -1:
                h = (h + 1) & nmask
            nkeys[h] = kk
            nvals[h] = vals[t]
    return nkeys, nvals


@njit(cache=True)
def _torus_dist2(pos, i, j):
    k = pos.shape[1]
    acc = 0.0
    for a in range(k):
        d = pos[i, a] - pos[j, a]
        if d < 0.0:
            d = -d
        if d > 0.5:
            d = 1.0 - d
        acc += d * d
    return acc


# ---------------------------------------------------------------------------
# Percolation graph matching
# ---------------------------------------------------------------------------

@njit(cache=True)
def pgm_lazy(indptr1, indices1, indptr2, indices2, n1, n2,
             seeds1, seeds2, r, max_steps, seed_state,
             use_masks, in1, out1, in2, out2, record_trace):
    """Threshold-r percolation over the lazily explored pairs graph.

    Counters live in an open-addressing map; a pair is tested for admission
    exactly once, when its counter first reaches r (discarded forever on
    conflict). One splitmix64 draw per step picks the expanded frontier pair.
    Returns (matched1, matched2, steps, frontier_trace).
    """
    cap = 1 << 16
    keys = np.full(cap, -1, dtype=np.int64)
    vals = np.zeros(cap, dtype=np.int32)
    mask = np.int64(cap - 1)
    filled = 0

    used1 = np.zeros(n1, dtype=np.bool_)
    used2 = np.zeros(n2, dtype=np.bool_)

    nmin = n1 if n1 < n2 else n2
    fr1 = np.empty(nmin, dtype=np.int64)
    fr2 = np.empty(nmin, dtype=np.int64)
    flen = 0
    for i in range(seeds1.shape[0]):
        fr1[flen] = seeds1[i]
        fr2[flen] = seeds2[i]
        flen += 1
        used1[seeds1[i]] = True
        used2[seeds2[i]] = True

    matched1 = np.empty(nmin, dtype=np.int64)
    matched2 = np.empty(nmin, dtype=np.int64)
    mcount = 0

    tcap = max_steps if record_trace else 1
    trace = np.zeros(tcap, dtype=np.int64)

    cr_cap = 1024
    cr_u = np.empty(cr_cap, dtype=np.int64)
    cr_v = np.empty(cr_cap, dtype=np.int64)

    state = U64(seed_state)
    steps = 0
    while flen > 0 and steps < max_steps:
        state, z = _sm64(state)
        idx = np.int64(z % U64(flen))
        z1 = fr1[idx]
        z2 = fr2[idx]
        fr1[idx] = fr1[flen - 1]
        fr2[idx] = fr2[flen - 1]
        flen -= 1
        matched1[mcount] = z1
        matched2[mcount] = z2
        mcount += 1
        steps += 1

        # adjacency rows are sorted, so crossers come out in (u, v) order
        ncross = 0
        for ii in range(indptr1[z1], indptr1[z1 + 1]):
            u = np.int64(indices1[ii])
            for jj in range(indptr2[z2], indptr2[z2 + 1]):
                v = np.int64(indices2[jj])
                if use_masks:
                    if not ((in1[u] and out2[v]) or (in2[v] and out1[u])):
                        continue
                key = u * n2 + v
                h = _hash_slot(key, mask)
                while True:
                    kk = keys[h]
                    if kk == key:
                        vals[h] += 1
                        newval = vals[h]
                        break
                    if kk == -1:
                        keys[h] = key
                        vals[h] = 1
                        newval = 1
                        filled += 1
                        break
                    h = (h + 1) & mask
                if filled * 3 > (mask + 1) * 2:
                    keys, vals = _map_grow(keys, vals)
                    mask = np.int64(keys.shape[0] - 1)
                if newval == r:
                    if ncross == cr_cap:
                        cr_cap *= 2
                        tmp_u = np.empty(cr_cap, dtype=np.int64)
                        tmp_v = np.empty(cr_cap, dtype=np.int64)
                        tmp_u[:ncross] = cr_u[:ncross]
                        tmp_v[:ncross] = cr_v[:ncross]
                        cr_u = tmp_u
                        cr_v = tmp_v
                    cr_u[ncross] = u
                    cr_v[ncross] = v
                    ncross += 1

        for t in range(ncross):
            u = cr_u[t]
            v = cr_v[t]
            if not used1[u] and not used2[v]:
                used1[u] = True
                used2[v] = True
                fr1[flen] = u
                fr2[flen] = v
                flen += 1

        if record_trace:
            trace[steps - 1] = flen

    return matched1[:mcount], matched2[:mcount], steps, trace[:steps]


@njit(cache=True)
def pgm_bipartite(indptr1, indices1, indptr2, indices2, n1, n2,
                  seedsL1, seedsL2, seedsR1, seedsR2, r, max_steps, seed_state,
                  inL1, outL1, inL2, outL2, inR1, outR1, inR2, outR2):
    """Two-sided percolation: marks cross between the left and right spaces.

    Per iteration one pair is drawn from each non-empty frontier; marks from
    a left expansion land only on right-side pairs and vice versa, so only
    cross-side edges ever carry marks. Continues single-sided when one
    frontier empties. Returns matched pairs, step count, and mark accounting
    (cross-side marks applied, same-side candidates seen, same-side marks
    applied - structurally zero).
    """
    cap = 1 << 16
    keys = np.full(cap, -1, dtype=np.int64)
    vals = np.zeros(cap, dtype=np.int32)
    mask = np.int64(cap - 1)
    filled = 0

    used1 = np.zeros(n1, dtype=np.bool_)
    used2 = np.zeros(n2, dtype=np.bool_)

    nmin = n1 if n1 < n2 else n2
    frL1 = np.empty(nmin, dtype=np.int64)
    frL2 = np.empty(nmin, dtype=np.int64)
    frR1 = np.empty(nmin, dtype=np.int64)
    frR2 = np.empty(nmin, dtype=np.int64)
    flenL = 0
    flenR = 0
    for i in range(seedsL1.shape[0]):
        frL1[flenL] = seedsL1[i]
        frL2[flenL] = seedsL2[i]
        flenL += 1
        used1[seedsL1[i]] = True
        used2[seedsL2[i]] = True
    for i in range(seedsR1.shape[0]):
        frR1[flenR] = seedsR1[i]
        frR2[flenR] = seedsR2[i]
        flenR += 1
        used1[seedsR1[i]] = True
        used2[seedsR2[i]] = True

    matched1 = np.empty(nmin, dtype=np.int64)
    matched2 = np.empty(nmin, dtype=np.int64)
    mside = np.empty(nmin, dtype=np.int8)  # 0 = left, 1 = right
    mcount = 0

    cr_cap = 1024
    cr_u = np.empty(cr_cap, dtype=np.int64)
    cr_v = np.empty(cr_cap, dtype=np.int64)
    cr_side = np.empty(cr_cap, dtype=np.int8)

    cross_marks = 0
    same_candidates = 0
    same_marks = 0

    state = U64(seed_state)
    steps = 0
    while (flenL > 0 or flenR > 0) and steps < max_steps:
        ncross = 0
        for side in range(2):
            if side == 0:
                if flenL == 0:
                    continue
                state, z = _sm64(state)
                idx = np.int64(z % U64(flenL))
                z1 = frL1[idx]
                z2 = frL2[idx]
                frL1[idx] = frL1[flenL - 1]
                frL2[idx] = frL2[flenL - 1]
                flenL -= 1
            else:
                if flenR == 0:
                    continue
                state, z = _sm64(state)
                idx = np.int64(z % U64(flenR))
                z1 = frR1[idx]
                z2 = frR2[idx]
                frR1[idx] = frR1[flenR - 1]
                frR2[idx] = frR2[flenR - 1]
                flenR -= 1
            matched1[mcount] = z1
            matched2[mcount] = z2
            mside[mcount] = side
            mcount += 1
            steps += 1

            for ii in range(indptr1[z1], indptr1[z1 + 1]):
                u = np.int64(indices1[ii])
                for jj in range(indptr2[z2], indptr2[z2 + 1]):
                    v = np.int64(indices2[jj])
                    if side == 0:
                        target_ok = (inR1[u] and outR2[v]) or (inR2[v] and outR1[u])
                        same_ok = (inL1[u] and outL2[v]) or (inL2[v] and outL1[u])
                        tgt_side = 1
                    else:
                        target_ok = (inL1[u] and outL2[v]) or (inL2[v] and outL1[u])
                        same_ok = (inR1[u] and outR2[v]) or (inR2[v] and outR1[u])
                        tgt_side = 0
                    if same_ok:
                        same_candidates += 1
                    if not target_ok:
                        continue
                    cross_marks += 1
                    key = u * n2 + v
                    h = _hash_slot(key, mask)
                    while True:
                        kk = keys[h]
                        if kk == key:
                            vals[h] += 1
                            newval = vals[h]
                            break
                        if kk == -1:
                            keys[h] = key
                            vals[h] = 1
                            newval = 1
                            filled += 1
                            break
                        h = (h + 1) & mask
                    if filled * 3 > (mask + 1) * 2:
                        keys, vals = _map_grow(keys, vals)
                        mask = np.int64(keys.shape[0] - 1)
                    if newval == r:
                        if ncross == cr_cap:
                            cr_cap *= 2
                            tmp_u = np.empty(cr_cap, dtype=np.int64)
                            tmp_v = np.empty(cr_cap, dtype=np.int64)
                            tmp_s = np.empty(cr_cap, dtype=np.int8)
                            tmp_u[:ncross] = cr_u[:ncross]
                            tmp_v[:ncross] = cr_v[:ncross]
                            tmp_s[:ncross] = cr_side[:ncross]
                            cr_u = tmp_u
                            cr_v = tmp_v
                            cr_side = tmp_s
                        cr_u[ncross] = u
                        cr_v[ncross] = v
                        cr_side[ncross] = tgt_side
                        ncross += 1

        for t in range(ncross):
            u = cr_u[t]
            v = cr_v[t]
            if not used1[u] and not used2[v]:
                used1[u] = True
                used2[v] = True
                if cr_side[t] == 0:
                    frL1[flenL] = u
                    frL2[flenL] = v
                    flenL += 1
                else:
                    frR1[flenR] = u
                    frR2[flenR] = v
                    flenR += 1

    return (matched1[:mcount], matched2[:mcount], mside[:mcount], steps,
            cross_marks, same_candidates, same_marks)


# ---------------------------------------------------------------------------
# Batch support counting (ring expansion, threshold matching)
# ---------------------------------------------------------------------------

@njit(cache=True)
def add_pair_support(keys, vals, filled, indptr1, indices1, indptr2, indices2,
                     n2, m1, m2):
    """Add one mark to every pairs-graph neighbor of the pairs (m1[i], m2[i]).

    Accumulates into the given open map (pass keys with -1 sentinel); returns
    the possibly reallocated map arrays. Used where a batch of matched pairs
    acts as a pool of mark sources rather than a sequential frontier.
    """
    mask = np.int64(keys.shape[0] - 1)
    for t in range(m1.shape[0]):
        a = m1[t]
        b = m2[t]
        for ii in range(indptr1[a], indptr1[a + 1]):
            u = np.int64(indices1[ii])
            base = u * n2
            for jj in range(indptr2[b], indptr2[b + 1]):
                key = base + np.int64(indices2[jj])
                h = _hash_slot(key, mask)
                while True:
                    kk = keys[h]
                    if kk == key:
                        vals[h] += 1
                        break
                    if kk == -1:
                        keys[h] = key
                        vals[h] = 1
                        filled += 1
                        break
                    h = (h + 1) & mask
                if filled * 3 > (mask + 1) * 2:
                    keys, vals = _map_grow(keys, vals)
                    mask = np.int64(keys.shape[0] - 1)
    return keys, vals, filled


@njit(cache=True)
def collect_support_at_least(keys, vals, n2, threshold):
    """Extract (u, v, count) for every map entry with count >= threshold."""
    total = 0
    for t in range(keys.shape[0]):
        if keys[t] != -1 and vals[t] >= threshold:
            total += 1
    out_u = np.empty(total, dtype=np.int64)
    out_v = np.empty(total, dtype=np.int64)
    out_c = np.empty(total, dtype=np.int64)
    w = 0
    for t in range(keys.shape[0]):
        if keys[t] != -1 and vals[t] >= threshold:
            out_u[w] = keys[t] // n2
            out_v[w] = keys[t] % n2
            out_c[w] = vals[t]
            w += 1
    return out_u, out_v, out_c


# ---------------------------------------------------------------------------
# Neighborhood statistics
# ---------------------------------------------------------------------------

@njit(inline="always")
def _intersect_size(indices, lo1, hi1, lo2, hi2):
    i = lo1
    j = lo2
    count = 0
    while i < hi1 and j < hi2:
        a = indices[i]
        b = indices[j]
        if a == b:
            count += 1
            i += 1
            j += 1
        elif a < b:
            i += 1
        else:
            j += 1
    return count


@njit(cache=True)
def pair_common_neighbors(indptr, indices, i, j):
    return _intersect_size(indices, indptr[i], indptr[i + 1],
                           indptr[j], indptr[j + 1])


@njit(cache=True)
def node_common_neighbors(indptr, indices, center, n):
    """Common-neighbor count between ``center`` and every node."""
    out = np.zeros(n, dtype=np.int64)
    for j in range(n):
        if j != center:
            out[j] = _intersect_size(indices, indptr[center], indptr[center + 1],
                                     indptr[j], indptr[j + 1])
    return out


@njit(cache=True)
def edge_slot_common_neighbors(indptr, indices):
    """Per adjacency slot (u -> indices[t]): |N(u) & N(v)|."""
    out = np.zeros(indices.shape[0], dtype=np.int64)
    n = indptr.shape[0] - 1
    for u in range(n):
        for t in range(indptr[u], indptr[u + 1]):
            v = indices[t]
            out[t] = _intersect_size(indices, indptr[u], indptr[u + 1],
                                     indptr[v], indptr[v + 1])
    return out


@njit(cache=True)
def triangles_and_wedges(indptr, indices):
    """(closed triangles, wedges) for transitivity = 3 * tri / wedges."""
    n = indptr.shape[0] - 1
    tri = 0
    wedges = 0
    for u in range(n):
        deg = indptr[u + 1] - indptr[u]
        wedges += deg * (deg - 1) // 2
        for t in range(indptr[u], indptr[u + 1]):
            v = indices[t]
            if v <= u:
                continue
            # common neighbors w > v close a triangle u < v < w exactly once
            i = indptr[u]
            j = indptr[v]
            hi1 = indptr[u + 1]
            hi2 = indptr[v + 1]
            while i < hi1 and j < hi2:
                a = indices[i]
                b = indices[j]
                if a == b:
                    if a > v:
                        tri += 1
                    i += 1
                    j += 1
                elif a < b:
                    i += 1
                else:
                    j += 1
    return tri, wedges


# ---------------------------------------------------------------------------
# Graph generation
# ---------------------------------------------------------------------------

@njit(cache=True)
def er_edges(n, p, seed_state):
    """G(n, p) via geometric skips over the lexicographic pair order."""
    total = n * (n - 1) // 2
    cap = 1024
    eu = np.empty(cap, dtype=np.int64)
    ev = np.empty(cap, dtype=np.int64)
    m = 0
    if p <= 0.0 or total == 0:
        return eu[:0], ev[:0]
    state = U64(seed_state)
    log1p = np.log(1.0 - p) if p < 1.0 else 0.0
    t = np.int64(-1)
    while True:
        if p >= 1.0:
            t += 1
        else:
            state, u = _u01(state)
            if u >= 1.0:
                u = 0.9999999999999999
            skip = np.int64(np.floor(np.log(1.0 - u) / log1p))
            t += 1 + skip
        if t >= total:
            break
        i, j = _decode_pair(t, n)
        if m == cap:
            cap *= 2
            tu = np.empty(cap, dtype=np.int64)
            tv = np.empty(cap, dtype=np.int64)
            tu[:m] = eu[:m]
            tv[:m] = ev[:m]
            eu = tu
            ev = tv
        eu[m] = i
        ev[m] = j
        m += 1
    return eu[:m], ev[:m]


@njit(inline="always")
def _decode_pair(t, n):
    """Lexicographic pair index t -> (i, j) with i < j, guarded for rounding."""
    i = np.int64(n - 2 - np.floor(
        np.sqrt(-8.0 * t + 4.0 * n * (n - 1) - 7.0) / 2.0 - 0.5))
    if i < 0:
        i = np.int64(0)
    while i > 0 and t < i * n - (i * (i + 1)) // 2:
        i -= 1
    while i < n - 2 and t >= (i + 1) * n - ((i + 1) * (i + 2)) // 2:
        i += 1
    j = t - (i * n - (i * (i + 1)) // 2) + i + 1
    return i, j


@njit(inline="always")
def _edge_prob(d2, K, C, beta, inf_beta):
    # d2 is the squared distance
    if d2 <= C * C:
        return K
    if inf_beta:
        return 0.0
    d = np.sqrt(d2)
    return K * (C / d) ** beta


@njit(cache=True)
def geometric_edges_grid(pos, order, cell_start, offsets, Mgrid, K, C, beta,
                         inf_beta, d_cut, seed_state):
    """Near-range stage: Bernoulli edges for all pairs within d_cut.

    Nodes are bucketed into a torus grid of Mgrid cells per axis; ``offsets``
    enumerates the half-space of neighbor cell displacements so each
    unordered pair is visited once (same-cell pairs use i < j).
    """
    k = pos.shape[1]
    ncells = cell_start.shape[0] - 1
    d_cut2 = d_cut * d_cut
    state = U64(seed_state)

    cap = 1024
    eu = np.empty(cap, dtype=np.int64)
    ev = np.empty(cap, dtype=np.int64)
    m = 0
    checked = np.int64(0)

    cidx = np.empty(k, dtype=np.int64)
    for c in range(ncells):
        lo = cell_start[c]
        hi = cell_start[c + 1]
        if lo == hi:
            continue
        # same cell, i < j
        for a in range(lo, hi):
            for b in range(a + 1, hi):
                i = order[a]
                j = order[b]
                checked += 1
                d2 = _torus_dist2(pos, i, j)
                if d2 <= d_cut2:
                    p = _edge_prob(d2, K, C, beta, inf_beta)
                    state, u01 = _u01(state)
                    if u01 < p:
                        if m == cap:
                            cap *= 2
                            tu = np.empty(cap, dtype=np.int64)
                            tv = np.empty(cap, dtype=np.int64)
                            tu[:m] = eu[:m]
                            tv[:m] = ev[:m]
                            eu = tu
                            ev = tv
                        eu[m] = i if i < j else j
                        ev[m] = j if i < j else i
                        m += 1
        # decode this cell's multi-index
        rem = c
        for a in range(k):
            cidx[a] = rem % Mgrid
            rem //= Mgrid
        for o in range(offsets.shape[0]):
            nc = np.int64(0)
            mult = np.int64(1)
            for a in range(k):
                w = (cidx[a] + offsets[o, a]) % Mgrid
                if w < 0:
                    w += Mgrid
                nc += w * mult
                mult *= Mgrid
            lo2 = cell_start[nc]
            hi2 = cell_start[nc + 1]
            for a in range(lo, hi):
                for b in range(lo2, hi2):
                    i = order[a]
                    j = order[b]
                    checked += 1
                    d2 = _torus_dist2(pos, i, j)
                    if d2 <= d_cut2:
                        p = _edge_prob(d2, K, C, beta, inf_beta)
                        state, u01 = _u01(state)
                        if u01 < p:
                            if m == cap:
                                cap *= 2
                                tu = np.empty(cap, dtype=np.int64)
                                tv = np.empty(cap, dtype=np.int64)
                                tu[:m] = eu[:m]
                                tv[:m] = ev[:m]
                                eu = tu
                                ev = tv
                            eu[m] = i if i < j else j
                            ev[m] = j if i < j else i
                            m += 1
    return eu[:m], ev[:m], checked


@njit(cache=True)
def geometric_edges_allpairs(pos, K, C, beta, inf_beta, d_cut, seed_state):
    """Near-range stage without a grid (small n or coarse grids)."""
    n = pos.shape[0]
    d_cut2 = d_cut * d_cut
    state = U64(seed_state)
    cap = 1024
    eu = np.empty(cap, dtype=np.int64)
    ev = np.empty(cap, dtype=np.int64)
    m = 0
    for i in range(n):
        for j in range(i + 1, n):
            d2 = _torus_dist2(pos, i, j)
            if d2 <= d_cut2:
                p = _edge_prob(d2, K, C, beta, inf_beta)
                state, u01 = _u01(state)
                if u01 < p:
                    if m == cap:
                        cap *= 2
                        tu = np.empty(cap, dtype=np.int64)
                        tv = np.empty(cap, dtype=np.int64)
                        tu[:m] = eu[:m]
                        tv[:m] = ev[:m]
                        eu = tu
                        ev = tv
                    eu[m] = i
                    ev[m] = j
                    m += 1
    return eu[:m], ev[:m], np.int64(n * (n - 1) // 2)


@njit(cache=True)
def geometric_edges_tail(pos, K, C, beta, inf_beta, d_cut, p_floor, seed_state):
    """Long-range stage: dominated rejection over pairs beyond d_cut.

    Samples a G(n, p_floor) candidate stream (p_floor >= p(d) for d > d_cut)
    and keeps each candidate with probability p(d)/p_floor, which generates
    the exact Bernoulli law on the tail; pairs within d_cut were already
    handled by the near stage and are skipped here.
    """
    n = pos.shape[0]
    total = n * (n - 1) // 2
    d_cut2 = d_cut * d_cut
    cap = 1024
    eu = np.empty(cap, dtype=np.int64)
    ev = np.empty(cap, dtype=np.int64)
    m = 0
    candidates = np.int64(0)
    if p_floor <= 0.0:
        return eu[:0], ev[:0], candidates
    state = U64(seed_state)
    log1p = np.log(1.0 - p_floor) if p_floor < 1.0 else 0.0
    t = np.int64(-1)
    while True:
        if p_floor >= 1.0:
            t += 1
        else:
            state, u = _u01(state)
            if u >= 1.0:
                u = 0.9999999999999999
            skip = np.int64(np.floor(np.log(1.0 - u) / log1p))
            t += 1 + skip
        if t >= total:
            break
        i, j = _decode_pair(t, n)
        candidates += 1
        d2 = _torus_dist2(pos, i, j)
        if d2 <= d_cut2:
            continue
        p = _edge_prob(d2, K, C, beta, inf_beta)
        state, u01 = _u01(state)
        if u01 < p / p_floor:
            if m == cap:
                cap *= 2
                tu = np.empty(cap, dtype=np.int64)
                tv = np.empty(cap, dtype=np.int64)
                tu[:m] = eu[:m]
                tv[:m] = ev[:m]
                eu = tu
                ev = tv
            eu[m] = i
            ev[m] = j
            m += 1
    return eu[:m], ev[:m], candidates


@njit(cache=True)
def torus_lengths_for_edges(pos, eu, ev):
    out = np.empty(eu.shape[0], dtype=np.float64)
    for t in range(eu.shape[0]):
        out[t] = np.sqrt(_torus_dist2(pos, eu[t], ev[t]))
    return out
