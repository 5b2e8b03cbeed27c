"""Compiled inner loops shared by every coloring family.

Each family supplies two jitted callables with fixed signatures:

    red(params, u, v, w) -> bool
    pair_counts(params, n, u, v, cap_b, cap_r) -> (blue, red, complete)

``pair_counts`` scans third vertices and may stop as soon as the blue count
exceeds ``cap_b`` *and* the red count exceeds ``cap_r``; ``complete`` tells
whether the returned counts are the exact pair degrees.  The generic kernels
below take those callables as arguments, so numba specialises one copy per
family.
"""

import functools

import numpy as np
from numba import njit, uint64

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
ALL_ONES = np.uint64(0xFFFFFFFFFFFFFFFF)


@njit(inline="always")
def mix64(z):
    z = (z ^ (z >> uint64(30))) * uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> uint64(27))) * uint64(0x94D049BB133111EB)
    return z ^ (z >> uint64(31))


@njit(inline="always")
def popcount64(x):
    x = x - ((x >> uint64(1)) & uint64(0x5555555555555555))
    x = (x & uint64(0x3333333333333333)) + ((x >> uint64(2)) & uint64(0x3333333333333333))
    x = (x + (x >> uint64(4))) & uint64(0x0F0F0F0F0F0F0F0F)
    return (x * uint64(0x0101010101010101)) >> uint64(56)


@njit(inline="always")
def sort3(a, b, c):
    if a > b:
        a, b = b, a
    if b > c:
        b, c = c, b
    if a > b:
        a, b = b, a
    return a, b, c


# ---------------------------------------------------------------------------
# hashed Bernoulli lanes
#
# A 64-bit word h(key, plane) supplies bit ``plane`` (MSB first) of a uniform
# 64-bit value for 64 lanes at once.  A lane is "hit" iff its value is below
# the threshold; the comparison is done bit-serially and stops as soon as every
# lane is decided, so p = 1/2 costs one hash per 64 lanes.


@njit(inline="always")
def lanes_below(seed, thr, key, valid):
    base = mix64(key ^ seed)
    lt = uint64(0)
    eq = valid
    x = base
    for j in range(64):
        shift = uint64(63 - j)
        if j > 0:
            x = mix64(base + uint64(j) * uint64(0x9E3779B97F4A7C15))
        if (thr >> shift) & uint64(1):
            lt |= eq & ~x
            eq &= x
        else:
            eq &= ~x
        if j == 63:
            break
        rest = thr & ((uint64(1) << shift) - uint64(1))
        if eq == uint64(0) or rest == uint64(0):
            break
    return lt


@njit(inline="always")
def lane_below(seed, thr, key, lane):
    return (lanes_below(seed, thr, key, uint64(1) << uint64(lane)) >> uint64(lane)) & uint64(1)


@njit(inline="always")
def _key(a, b, blk):
    return (uint64(a) << uint64(42)) | (uint64(b) << uint64(21)) | uint64(blk)


# ---------------------------------------------------------------------------
# seeded random triple coloring: params = (seed, thr, full)


@njit
def random_red(params, u, v, w):
    seed, thr, full = params
    if full:
        return True
    a, b, c = sort3(u, v, w)
    return lane_below(seed, thr, _key(a, b, c >> 6), c & 63) == uint64(1)


@njit
def random_pair_counts(params, n, u, v, cap_b, cap_r):
    seed, thr, full = params
    if full:
        return 0, n - 2, True
    a = min(u, v)
    b = max(u, v)
    cb = 0
    cr = 0
    # third vertex above both: 64 triples per key
    lo = b + 1
    if lo < n:
        for blk in range(lo >> 6, ((n - 1) >> 6) + 1):
            start = blk << 6
            valid = ALL_ONES
            if start < lo:
                valid &= ALL_ONES << uint64(lo - start)
            if start + 64 > n:
                valid &= (uint64(1) << uint64(n - start)) - uint64(1)
            red = np.int64(popcount64(lanes_below(seed, thr, _key(a, b, blk), valid) & valid))
            cr += red
            cb += np.int64(popcount64(valid)) - red
            if cb > cap_b and cr > cap_r:
                return cb, cr, False
    for w in range(a):
        if lane_below(seed, thr, _key(w, a, b >> 6), b & 63):
            cr += 1
        else:
            cb += 1
        if cb > cap_b and cr > cap_r:
            return cb, cr, False
    for w in range(a + 1, b):
        if lane_below(seed, thr, _key(a, w, b >> 6), b & 63):
            cr += 1
        else:
            cb += 1
        if cb > cap_b and cr > cap_r:
            return cb, cr, False
    return cb, cr, True


# ---------------------------------------------------------------------------
# constant coloring: params = (is_red,)


@njit
def constant_red(params, u, v, w):
    return params[0]


@njit
def constant_pair_counts(params, n, u, v, cap_b, cap_r):
    if params[0]:
        return 0, n - 2, True
    return n - 2, 0, True


# ---------------------------------------------------------------------------
# explicit coloring: params = (bits,) with one uint8 per triple in colex order


@njit(inline="always")
def colex_rank(a, b, c):
    return c * (c - 1) * (c - 2) // 6 + b * (b - 1) // 2 + a


@njit
def explicit_red(params, u, v, w):
    a, b, c = sort3(np.int64(u), np.int64(v), np.int64(w))
    return params[0][colex_rank(a, b, c)] != 0


# ---------------------------------------------------------------------------
# graph edge oracles for simple colorings


@njit
def gnp_edge(params, u, v):
    seed, thr, full = params
    if full:
        return True
    a = min(u, v)
    b = max(u, v)
    return lane_below(seed, thr, _key(a, b >> 6, 0), b & 63) == uint64(1)


@njit
def bitrow_edge(params, u, v):
    rows = params[0]
    return (rows[u, v >> 6] >> uint64(v & 63)) & uint64(1) == uint64(1)


@njit
def bitrow_pair_counts(params, n, u, v, cap_b, cap_r):
    # closed form: blue degree of a non-edge is |N(u) | N(v)|
    rows = params[0]
    if bitrow_edge(params, u, v):
        return n - 2, 0, True
    cb = 0
    for k in range(rows.shape[1]):
        cb += np.int64(popcount64(rows[u, k] | rows[v, k]))
    return cb, n - 2 - cb, True


@functools.lru_cache(maxsize=None)
def simple_fns(edge):
    """Red test and pair counter for the coloring induced by ``edge``."""

    @njit
    def red(params, u, v, w):
        return not (edge(params, u, v) or edge(params, u, w) or edge(params, v, w))

    @njit
    def pair_counts(params, n, u, v, cap_b, cap_r):
        if edge(params, u, v):
            return n - 2, 0, True
        cb = 0
        cr = 0
        for w in range(n):
            if w == u or w == v:
                continue
            if edge(params, u, w) or edge(params, v, w):
                cb += 1
            else:
                cr += 1
            if cb > cap_b and cr > cap_r:
                return cb, cr, False
        return cb, cr, True

    return red, pair_counts


@functools.lru_cache(maxsize=None)
def generic_pair_counts(red):
    @njit
    def pair_counts(params, n, u, v, cap_b, cap_r):
        cb = 0
        cr = 0
        for w in range(n):
            if w == u or w == v:
                continue
            if red(params, u, v, w):
                cr += 1
            else:
                cb += 1
            if cb > cap_b and cr > cap_r:
                return cb, cr, False
        return cb, cr, True

    return pair_counts


@functools.lru_cache(maxsize=None)
def restricted_red(parent_red):
    # params = (parent_params, vertex_map)
    @njit
    def red(params, u, v, w):
        mp = params[1]
        return parent_red(params[0], mp[u], mp[v], mp[w])

    return red


@functools.lru_cache(maxsize=None)
def flipped_fns(parent_red, parent_pair_counts):
    @njit
    def red(params, u, v, w):
        return not parent_red(params, u, v, w)

    @njit
    def pair_counts(params, n, u, v, cap_b, cap_r):
        cb, cr, done = parent_pair_counts(params, n, u, v, cap_r, cap_b)
        return cr, cb, done

    return red, pair_counts


# ---------------------------------------------------------------------------
# generic batch kernels


@njit
def red_mask(red, params, u, v, ws):
    out = np.empty(ws.shape[0], dtype=np.bool_)
    for i in range(ws.shape[0]):
        out[i] = red(params, u, v, ws[i])
    return out


@njit
def thin_scan(pair_counts, params, n, v, us, cap):
    """Exact small degrees of every pair (u, v), u in ``us``; -1 when > cap."""
    k = us.shape[0]
    bthin = np.full(k, -1, dtype=np.int32)
    rthin = np.full(k, -1, dtype=np.int32)
    for i in range(k):
        cb, cr, done = pair_counts(params, n, us[i], v, cap, cap)
        if done:
            if cb <= cap:
                bthin[i] = cb
            if cr <= cap:
                rthin[i] = cr
    return bthin, rthin


@njit
def degrees_at_most(pair_counts, params, n, us, vs, want_red, m):
    """For each pair (us[i], vs[i]): is the chosen color degree <= m?"""
    k = us.shape[0]
    out = np.empty(k, dtype=np.bool_)
    for i in range(k):
        if want_red:
            cb, cr, done = pair_counts(params, n, us[i], vs[i], -1, m)
            out[i] = cr <= m
        else:
            cb, cr, done = pair_counts(params, n, us[i], vs[i], m, -1)
            out[i] = cb <= m
    return out


@njit
def exact_degrees(pair_counts, params, n, us, vs):
    k = us.shape[0]
    db = np.empty(k, dtype=np.int64)
    dr = np.empty(k, dtype=np.int64)
    for i in range(k):
        cb, cr, done = pair_counts(params, n, us[i], vs[i], n, n)
        db[i] = cb
        dr[i] = cr
    return db, dr


@njit
def count_through(red, params, v, hat, ws, want_red, limit):
    """Per w: #{u in hat, u != w : color(u, v, w) matches}, stopping past limit."""
    out = np.empty(ws.shape[0], dtype=np.int64)
    for i in range(ws.shape[0]):
        w = ws[i]
        c = 0
        for j in range(hat.shape[0]):
            u = hat[j]
            if u == w:
                continue
            if red(params, u, v, w) == want_red:
                c += 1
                if c > limit:
                    break
        out[i] = c
    return out


@njit
def first_matching(red, params, u, v, cands, want_red, k):
    """Up to k members of ``cands`` (in order) whose triple with uv matches."""
    out = np.empty(k, dtype=np.int64)
    c = 0
    for i in range(cands.shape[0]):
        if c >= k:
            break
        if red(params, u, v, cands[i]) == want_red:
            out[c] = cands[i]
            c += 1
    return out[:c]


@njit
def neighborhood_mask(red, params, n, pu, pv, want_red):
    out = np.zeros(n, dtype=np.bool_)
    for w in range(n):
        for i in range(pu.shape[0]):
            u = pu[i]
            v = pv[i]
            if w == u or w == v:
                continue
            if red(params, u, v, w) == want_red:
                out[w] = True
                break
    return out


@njit
def red_degree_table(red, params, n):
    """Full red pair-degree matrix by enumerating every triple once."""
    d = np.zeros((n, n), dtype=np.int64)
    for c in range(n):
        for b in range(c):
            for a in range(b):
                if red(params, a, b, c):
                    d[a, b] += 1
                    d[b, a] += 1
                    d[a, c] += 1
                    d[c, a] += 1
                    d[b, c] += 1
                    d[c, b] += 1
    return d


@njit
def red_bits_colex(red, params, n):
    total = n * (n - 1) * (n - 2) // 6
    out = np.zeros(total, dtype=np.uint8)
    i = 0
    for c in range(n):
        for b in range(c):
            for a in range(b):
                if red(params, a, b, c):
                    out[i] = 1
                i += 1
    return out
