"""numba-compiled loop implementations of the hot kernels.

Same names and signatures as ``_numpy``.  Functions are compiled lazily
on first call and cached on disk.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def transitive_closure(adj):
    n = adj.shape[0]
    reach = adj.copy()
    for k in range(n):
        for i in range(n):
            if reach[i, k]:
                for j in range(n):
                    if reach[k, j]:
                        reach[i, j] = True
    return reach


@njit(cache=True)
def up_closure_rel(leq, mask):
    n = leq.shape[0]
    out = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        if mask[i]:
            for j in range(n):
                if leq[i, j]:
                    out[j] = True
    return out


@njit(cache=True)
def down_closure_rel(leq, mask):
    n = leq.shape[0]
    out = np.zeros(n, dtype=np.bool_)
    for j in range(n):
        if mask[j]:
            for i in range(n):
                if leq[i, j]:
                    out[i] = True
    return out


@njit(cache=True)
def up_closure_pow(mask, nbits):
    out = mask.copy()
    n = out.shape[0]
    for b in range(nbits):
        bit = 1 << b
        for hi in range(0, n, 2 * bit):
            for m in range(hi, hi + bit):
                out[m + bit] |= out[m]
    return out


@njit(cache=True)
def down_closure_pow(mask, nbits):
    out = mask.copy()
    n = out.shape[0]
    for b in range(nbits):
        bit = 1 << b
        for hi in range(0, n, 2 * bit):
            for m in range(hi, hi + bit):
                out[m] |= out[m + bit]
    return out


@njit(cache=True)
def irremediable(alpha, req):
    n, nt = alpha.shape
    out = np.ones(nt, dtype=np.bool_)
    for s in range(n):
        if req[s]:
            for t in range(nt):
                if alpha[s, t]:
                    out[t] = False
    return out


@njit(cache=True)
def contained(alpha, req):
    n, nt = alpha.shape
    out = np.ones(nt, dtype=np.bool_)
    for s in range(n):
        if not req[s]:
            for t in range(nt):
                if alpha[s, t]:
                    out[t] = False
    return out


@njit(cache=True)
def first_witness(alpha, good, rows, order):
    n = alpha.shape[0]
    out = np.full(n, -2, dtype=np.int64)
    for s in range(n):
        if not rows[s]:
            continue
        out[s] = -1
        for k in range(order.shape[0]):
            t = order[k]
            if good[t] and alpha[s, t]:
                out[s] = t
                break
    return out


@njit(cache=True)
def monotone_violation_rel(leq, alpha):
    n, nt = alpha.shape
    for i in range(n):
        for j in range(n):
            if i != j and leq[i, j]:
                for t in range(nt):
                    if alpha[i, t] and not alpha[j, t]:
                        return i, j, t
    return -1, -1, -1


@njit(cache=True)
def _pack_rows(a):
    # bool matrix -> uint64 words per row, bit t % 64 of word t // 64
    n, nt = a.shape
    nw = (nt + 63) // 64
    out = np.zeros((n, nw), dtype=np.uint64)
    for i in range(n):
        for t in range(nt):
            if a[i, t]:
                out[i, t >> 6] |= np.uint64(1) << np.uint64(t & 63)
    return out


@njit(cache=True)
def monotone_violation_pow(alpha, nbits):
    n, nt = alpha.shape
    packed = _pack_rows(alpha)
    nw = packed.shape[1]
    for i in range(n):
        for b in range(nbits):
            bit = 1 << b
            if i & bit:
                continue
            j = i | bit
            for w in range(nw):
                if packed[i, w] & ~packed[j, w]:
                    for t in range(w * 64, min(nt, w * 64 + 64)):
                        if alpha[i, t] and not alpha[j, t]:
                            return i, j, t
    return -1, -1, -1


@njit(cache=True)
def power_alpha(nbits, tuples):
    n = 1 << nbits
    nt, k = tuples.shape
    need = np.zeros(nt, dtype=np.int64)
    for t in range(nt):
        for c in range(k):
            need[t] |= 1 << tuples[t, c]
    out = np.empty((n, nt), dtype=np.bool_)
    for m in range(n):
        for t in range(nt):
            out[m, t] = (m & need[t]) == need[t]
    return out


@njit(cache=True)
def subset_alpha(sys_sets, obs_sets):
    n = sys_sets.shape[0]
    nt = obs_sets.shape[0]
    have = _pack_rows(sys_sets)
    need = _pack_rows(obs_sets)
    nw = have.shape[1]
    out = np.empty((n, nt), dtype=np.bool_)
    for s in range(n):
        for t in range(nt):
            ok = True
            for w in range(nw):
                if need[t, w] & ~have[s, w]:
                    ok = False
                    break
            out[s, t] = ok
    return out
