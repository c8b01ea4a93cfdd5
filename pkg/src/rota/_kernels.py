"""Compiled elimination kernels.

GF(2) vectors are bit-packed: coordinate ``c`` is bit ``c & 63`` of word
``c >> 6`` in a little-endian ``uint64`` array. GF(p) kernels work on dense
``int64`` arrays with entries in ``[0, p)``; they require ``p < 2**31`` so that
products fit in 63 bits.
"""

from __future__ import annotations

import numba as nb
import numpy as np

_ONE = np.uint64(1)
_ZERO = np.uint64(0)
_DEBRUIJN = np.uint64(0x03F79D71B4CB0A89)
_DB_TABLE = np.array(
    [0, 1, 48, 2, 57, 49, 28, 3, 61, 58, 50, 42, 38, 29, 17, 4,
     62, 55, 59, 36, 53, 51, 43, 22, 45, 39, 33, 30, 24, 18, 12, 5,
     63, 47, 56, 27, 60, 41, 37, 16, 54, 35, 52, 21, 44, 32, 23, 11,
     46, 26, 40, 15, 34, 20, 31, 10, 25, 14, 19, 9, 13, 8, 7, 6],
    dtype=np.int64,
)

MAX_DENSE_P = 2**31


def words_for(n: int) -> int:
    return max(1, (n + 63) >> 6)


def pack_gf2(bits: np.ndarray) -> np.ndarray:
    """Pack a 0/1 array along its last axis into ``uint64`` words."""
    bits = np.asarray(bits)
    n = bits.shape[-1]
    W = words_for(n)
    packed = np.packbits(bits.astype(np.uint8) & 1, axis=-1, bitorder="little")
    pad = W * 8 - packed.shape[-1]
    if pad:
        widths = [(0, 0)] * (packed.ndim - 1) + [(0, pad)]
        packed = np.pad(packed, widths)
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64, copy=False)


def unpack_gf2(words: np.ndarray, n: int) -> np.ndarray:
    words = np.ascontiguousarray(np.asarray(words, dtype=np.uint64)).astype("<u8")
    raw = words.view(np.uint8)
    return np.unpackbits(raw, axis=-1, count=n, bitorder="little")


@nb.njit(cache=True, inline="always")
def _ctz(x):
    low = x & (~x + _ONE)
    return _DB_TABLE[(low * _DEBRUIJN) >> np.uint64(58)]


# --------------------------------------------------------------------- GF(2)


@nb.njit(cache=True)
def gf2_rank(rows_in, n):
    k, W = rows_in.shape
    rows = rows_in.copy()
    rank = 0
    for col in range(n):
        if rank == k:
            break
        w = col >> 6
        sh = np.uint64(col & 63)
        sel = -1
        for r in range(rank, k):
            if (rows[r, w] >> sh) & _ONE:
                sel = r
                break
        if sel < 0:
            continue
        for u in range(W):
            t = rows[sel, u]
            rows[sel, u] = rows[rank, u]
            rows[rank, u] = t
        for r in range(rank + 1, k):
            m = _ZERO - ((rows[r, w] >> sh) & _ONE)
            for u in range(w, W):
                rows[r, u] ^= rows[rank, u] & m
        rank += 1
    return rank


@nb.njit(cache=True)
def _gf2_reduce_insert(rows, piv_of_col, nrows, v):
    """Reduce ``v`` in place against the echelon ``rows``; insert it if independent."""
    W = v.shape[0]
    for w in range(W):
        while v[w] != _ZERO:
            col = w * 64 + _ctz(v[w])
            r = piv_of_col[col]
            if r < 0:
                for u in range(W):
                    rows[nrows, u] = v[u]
                piv_of_col[col] = nrows
                return True
            for u in range(w, W):
                v[u] ^= rows[r, u]
    return False


@nb.njit(cache=True)
def gf2_greedy(cands, n, target):
    """Indices of the greedily independent prefix-maximal subsequence of ``cands``."""
    c, W = cands.shape
    rows = np.zeros((max(target, 1), W), dtype=np.uint64)
    piv = np.full(W * 64, -1, dtype=np.int64)
    out = np.empty(target, dtype=np.int64)
    v = np.empty(W, dtype=np.uint64)
    got = 0
    for i in range(c):
        if got == target:
            break
        for u in range(W):
            v[u] = cands[i, u]
        if _gf2_reduce_insert(rows, piv, got, v):
            out[got] = i
            got += 1
    return out[:got]


@nb.njit(cache=True)
def _gf2_rref(rows_in, n):
    k, W = rows_in.shape
    rows = rows_in.copy()
    pivots = np.empty(k, dtype=np.int64)
    rank = 0
    for col in range(n):
        if rank == k:
            break
        w = col >> 6
        sh = np.uint64(col & 63)
        sel = -1
        for r in range(rank, k):
            if (rows[r, w] >> sh) & _ONE:
                sel = r
                break
        if sel < 0:
            continue
        for u in range(W):
            t = rows[sel, u]
            rows[sel, u] = rows[rank, u]
            rows[rank, u] = t
        for r in range(k):
            if r != rank:
                m = _ZERO - ((rows[r, w] >> sh) & _ONE)
                for u in range(W):
                    rows[r, u] ^= rows[rank, u] & m
        pivots[rank] = col
        rank += 1
    return rows, pivots, rank


@nb.njit(cache=True)
def _gf2_square_full_rank(Q, k):
    """Whether the k vectors stored word-major in ``Q`` (shape (W2, k)) are independent.

    Column ``c`` of the k-by-k matrix lives in word ``c >> 6``. Destroys ``Q``.
    """
    W2 = Q.shape[0]
    msk = np.empty(k, np.uint64)
    piv = np.empty(W2, np.uint64)
    rank = 0
    for col in range(k):
        w = col >> 6
        sh = np.uint64(col & 63)
        row = Q[w]
        sel = -1
        for r in range(rank, k):
            if (row[r] >> sh) & _ONE:
                sel = r
                break
        if sel < 0:
            return False
        for u in range(w, W2):
            p = Q[u, sel]
            Q[u, sel] = Q[u, rank]
            Q[u, rank] = p
            piv[u] = p
        # branchless: random bits make the data-dependent branch mispredict
        for r in range(rank + 1, k):
            msk[r] = _ZERO - ((row[r] >> sh) & _ONE)
        for u in range(w, W2):
            pu = piv[u]
            qu = Q[u]
            for r in range(rank + 1, k):
                qu[r] ^= pu & msk[r]
        rank += 1
    return True


@nb.njit(cache=True)
def gf2_graph(X, Y, n):
    """Adjacency ``adj[h, j] = X[h] ∪ Y[j] is independent`` for packed X, Y.

    Requires ``X.shape[1] + Y.shape[1] == n`` with both parts non-empty. For each
    left vertex the map F^n -> F^n / span(X_h) ~ F^k2 is tabulated byte-wise
    (Four Russians), then each Y_j image is tested for full rank.
    """
    m1, k1, W = X.shape
    m2, k2, _ = Y.shape
    adj = np.zeros((m1, m2), dtype=np.bool_)
    W2 = (k2 + 63) >> 6
    nbytes = W * 8
    M = np.zeros((W * 64, W2), dtype=np.uint64)
    T = np.zeros((nbytes, 256, W2), dtype=np.uint64)
    free_idx = np.empty(n, dtype=np.int64)
    is_piv = np.zeros(n, dtype=np.bool_)
    Q = np.empty((W2, k2), dtype=np.uint64)
    acc = np.empty(W2, dtype=np.uint64)
    for h in range(m1):
        R, piv, rank = _gf2_rref(X[h], n)
        if rank < k1:
            continue
        is_piv[:] = False
        for r in range(k1):
            is_piv[piv[r]] = True
        f = 0
        for c in range(n):
            if is_piv[c]:
                free_idx[c] = -1
            else:
                free_idx[c] = f
                f += 1
        M[:] = 0
        for c in range(n):
            fi = free_idx[c]
            if fi >= 0:
                M[c, fi >> 6] = _ONE << np.uint64(fi & 63)
        # e_pivot ≡ e_pivot + R_r (mod span X_h), whose support is free columns only
        for r in range(k1):
            c0 = piv[r]
            for c in range(n):
                fi = free_idx[c]
                if fi >= 0 and (R[r, c >> 6] >> np.uint64(c & 63)) & _ONE:
                    M[c0, fi >> 6] ^= _ONE << np.uint64(fi & 63)
        for b in range(nbytes):
            for u in range(W2):
                T[b, 0, u] = 0
            for x in range(1, 256):
                lb = _ctz(np.uint64(x))
                t = x & (x - 1)
                for u in range(W2):
                    T[b, x, u] = T[b, t, u] ^ M[8 * b + lb, u]
        for j in range(m2):
            for a in range(k2):
                for u in range(W2):
                    acc[u] = 0
                for w in range(W):
                    word = Y[j, a, w]
                    for s in range(8):
                        tb = T[w * 8 + s, (word >> np.uint64(8 * s)) & np.uint64(0xFF)]
                        for u in range(W2):
                            acc[u] ^= tb[u]
                for u in range(W2):
                    Q[u, a] = acc[u]
            adj[h, j] = _gf2_square_full_rank(Q, k2)
    return adj


# --------------------------------------------------------------------- GF(p)


@nb.njit(cache=True)
def _inv_mod(a, p):
    t, new_t = 0, 1
    r, new_r = p, a
    while new_r != 0:
        q = r // new_r
        t, new_t = new_t, t - q * new_t
        r, new_r = new_r, r - q * new_r
    if t < 0:
        t += p
    return t


@nb.njit(cache=True)
def gfp_rank(A_in, p):
    k, n = A_in.shape
    A = A_in.copy()
    rank = 0
    for col in range(n):
        if rank == k:
            break
        sel = -1
        for r in range(rank, k):
            if A[r, col] != 0:
                sel = r
                break
        if sel < 0:
            continue
        for u in range(n):
            t = A[sel, u]
            A[sel, u] = A[rank, u]
            A[rank, u] = t
        inv = _inv_mod(A[rank, col], p)
        for u in range(col, n):
            A[rank, u] = (A[rank, u] * inv) % p
        for r in range(rank + 1, k):
            f = A[r, col]
            if f != 0:
                for u in range(col, n):
                    A[r, u] = (A[r, u] - f * A[rank, u]) % p
        rank += 1
    return rank


@nb.njit(cache=True)
def _gfp_reduce_insert(rows, piv_of_col, nrows, v, p):
    """Forward-reduce ``v`` against rows (each zero left of its unit pivot); insert if nonzero."""
    n = v.shape[0]
    for col in range(n):
        if v[col] == 0:
            continue
        r = piv_of_col[col]
        if r < 0:
            inv = _inv_mod(v[col], p)
            for u in range(col, n):
                rows[nrows, u] = (v[u] * inv) % p
            for u in range(col):
                rows[nrows, u] = 0
            piv_of_col[col] = nrows
            return True
        f = v[col]
        for u in range(col, n):
            v[u] = (v[u] - f * rows[r, u]) % p
    return False


@nb.njit(cache=True)
def gfp_greedy(cands, p, target):
    c, n = cands.shape
    rows = np.zeros((max(target, 1), n), dtype=np.int64)
    piv = np.full(n, -1, dtype=np.int64)
    out = np.empty(target, dtype=np.int64)
    v = np.empty(n, dtype=np.int64)
    got = 0
    for i in range(c):
        if got == target:
            break
        v[:] = cands[i]
        if _gfp_reduce_insert(rows, piv, got, v, p):
            out[got] = i
            got += 1
    return out[:got]


@nb.njit(cache=True)
def gfp_graph(X, Y, p):
    m1, k1, n = X.shape
    m2, k2, _ = Y.shape
    adj = np.zeros((m1, m2), dtype=np.bool_)
    base = np.zeros((k1 + k2 + 1, n), dtype=np.int64)
    base_piv = np.full(n, -1, dtype=np.int64)
    rows = np.zeros((k1 + k2 + 1, n), dtype=np.int64)
    piv = np.full(n, -1, dtype=np.int64)
    v = np.empty(n, dtype=np.int64)
    for h in range(m1):
        base_piv[:] = -1
        ok = True
        for a in range(k1):
            v[:] = X[h, a]
            if not _gfp_reduce_insert(base, base_piv, a, v, p):
                ok = False
                break
        if not ok:
            continue
        for j in range(m2):
            for a in range(k1):
                rows[a] = base[a]
            piv[:] = base_piv
            good = True
            for a in range(k2):
                v[:] = Y[j, a]
                if not _gfp_reduce_insert(rows, piv, k1 + a, v, p):
                    good = False
                    break
            adj[h, j] = good
    return adj
