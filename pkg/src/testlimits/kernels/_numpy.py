"""Vectorised numpy implementations of the hot kernels.

Every function here has a twin of the same name and signature in
``_numba``; the two are interchangeable and tested against each other.
Boolean arrays are ``np.bool_``; index arrays are ``np.int64``.
"""
import numpy as np


def transitive_closure(adj):
    reach = adj.copy()
    while True:
        nxt = reach | ((reach.astype(np.uint8) @ reach.astype(np.uint8)) > 0)
        if np.array_equal(nxt, reach):
            return reach
        reach = nxt


def up_closure_rel(leq, mask):
    return leq[mask].any(axis=0)


def down_closure_rel(leq, mask):
    return leq[:, mask].any(axis=1)


def _bit_views(arr, nbits):
    # view a 2**nbits vector as (high, 2, low) for every bit position
    for b in range(nbits):
        yield arr.reshape(-1, 2, 1 << b)


def up_closure_pow(mask, nbits):
    out = mask.copy()
    for v in _bit_views(out, nbits):
        v[:, 1, :] |= v[:, 0, :]
    return out


def down_closure_pow(mask, nbits):
    out = mask.copy()
    for v in _bit_views(out, nbits):
        v[:, 0, :] |= v[:, 1, :]
    return out


def irremediable(alpha, req):
    return ~alpha[req].any(axis=0)


def contained(alpha, req):
    return ~alpha[~req].any(axis=0)


def first_witness(alpha, good, rows, order):
    out = np.full(alpha.shape[0], -2, dtype=np.int64)
    idx = np.flatnonzero(rows)
    if idx.size == 0:
        return out
    if order.size == 0:
        out[idx] = -1
        return out
    hits = alpha[np.ix_(idx, order)] & good[order]
    has = hits.any(axis=1)
    first = order[hits.argmax(axis=1)]
    out[idx] = np.where(has, first, -1)
    return out


def _first_true(bad):
    flat = np.flatnonzero(bad)
    if flat.size == 0:
        return None
    return np.unravel_index(flat[0], bad.shape)


def monotone_violation_rel(leq, alpha):
    a = alpha.astype(np.int32)
    na = (~alpha).astype(np.int32)
    bad = leq & ((a @ na.T) > 0)
    hit = _first_true(bad)
    if hit is None:
        return -1, -1, -1
    i, j = int(hit[0]), int(hit[1])
    t = int(np.flatnonzero(alpha[i] & ~alpha[j])[0])
    return i, j, t


def monotone_violation_pow(alpha, nbits):
    n = alpha.shape[0]
    best = None
    for b in range(nbits):
        v = alpha.reshape(-1, 2, 1 << b, alpha.shape[1])
        bad = v[:, 0] & ~v[:, 1]
        hit = _first_true(bad.any(axis=2))
        if hit is None:
            continue
        lo = int(hit[0]) * (2 << b) + int(hit[1])
        if best is None or lo < best[0] or (lo == best[0] and lo | (1 << b) < best[1]):
            best = (lo, lo | (1 << b))
    if best is None:
        return -1, -1, -1
    i, j = best
    assert i < n
    t = int(np.flatnonzero(alpha[i] & ~alpha[j])[0])
    return i, j, t


def power_alpha(nbits, tuples):
    masks = np.arange(1 << nbits, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(nbits, dtype=np.int64)) & 1).astype(np.bool_)
    if tuples.shape[0] == 0:
        return np.zeros((1 << nbits, 0), dtype=np.bool_)
    return bits[:, tuples].all(axis=2)


def subset_alpha(sys_sets, obs_sets):
    missing = (~sys_sets).astype(np.int32)
    need = obs_sets.astype(np.int32)
    return (missing @ need.T) == 0
