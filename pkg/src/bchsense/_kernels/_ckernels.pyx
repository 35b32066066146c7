# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled packed-column kernels (popcount inner products, Gray-code sweep)."""

import numpy as np

from libc.stdint cimport uint64_t, int64_t

cdef extern from *:
    """
    static inline int bchs_popcount(unsigned long long x) { return __builtin_popcountll(x); }
    static inline int bchs_ctz(unsigned long long x) { return __builtin_ctzll(x); }
    """
    int bchs_popcount(unsigned long long x) nogil
    int bchs_ctz(unsigned long long x) nogil


cdef inline int64_t _ip(const uint64_t[:, ::1] P, const uint64_t[:, ::1] M,
                        Py_ssize_t i, Py_ssize_t j, Py_ssize_t W) noexcept nogil:
    cdef int64_t s = 0
    cdef Py_ssize_t w
    cdef uint64_t pi, mi, pj, mj
    for w in range(W):
        pi = P[i, w]
        mi = M[i, w]
        pj = P[j, w]
        mj = M[j, w]
        s += bchs_popcount((pi & pj) | (mi & mj)) - bchs_popcount((pi & mj) | (mi & pj))
    return s


def trit_gram(plus, minus):
    cdef const uint64_t[:, ::1] P = np.ascontiguousarray(plus, dtype=np.uint64)
    cdef const uint64_t[:, ::1] M = np.ascontiguousarray(minus, dtype=np.uint64)
    cdef Py_ssize_t n = P.shape[0], W = P.shape[1], i, j
    out = np.empty((n, n), dtype=np.int64)
    cdef int64_t[:, ::1] G = out
    cdef int64_t v
    with nogil:
        for i in range(n):
            for j in range(i, n):
                v = _ip(P, M, i, j, W)
                G[i, j] = v
                G[j, i] = v
    return out


def trit_max_coherence(plus, minus, nnz):
    cdef const uint64_t[:, ::1] P = np.ascontiguousarray(plus, dtype=np.uint64)
    cdef const uint64_t[:, ::1] M = np.ascontiguousarray(minus, dtype=np.uint64)
    cdef const int64_t[::1] Z = np.ascontiguousarray(nnz, dtype=np.int64)
    cdef Py_ssize_t n = P.shape[0], W = P.shape[1], i, j, w
    cdef Py_ssize_t bi = 0, bj = 0
    cdef int64_t v, a, bv = 0, best_abs = -1
    cdef double r, best = -1.0
    cdef bint flat = n == 0 or bool(np.all(np.asarray(Z) == Z[0]))
    cdef const uint64_t *pi
    cdef const uint64_t *mi
    cdef const uint64_t *pj
    cdef const uint64_t *mj
    with nogil:
        for i in range(n):
            pi = &P[i, 0]
            mi = &M[i, 0]
            for j in range(i + 1, n):
                pj = &P[j, 0]
                mj = &M[j, 0]
                v = 0
                for w in range(W):
                    v += (bchs_popcount((pi[w] & pj[w]) | (mi[w] & mj[w]))
                          - bchs_popcount((pi[w] & mj[w]) | (mi[w] & pj[w])))
                if flat:
                    # equal weights: the largest |ip| wins, no division needed
                    a = v if v >= 0 else -v
                    if a > best_abs:
                        best_abs = a
                        bi = i
                        bj = j
                        bv = v
                else:
                    r = (<double>v * <double>v) / (<double>Z[i] * <double>Z[j])
                    if r > best:
                        best = r
                        bi = i
                        bj = j
                        bv = v
    return int(bi), int(bj), int(bv)


def trit_pair_products(plus, minus, ii, jj):
    cdef const uint64_t[:, ::1] P = np.ascontiguousarray(plus, dtype=np.uint64)
    cdef const uint64_t[:, ::1] M = np.ascontiguousarray(minus, dtype=np.uint64)
    cdef const int64_t[::1] I = np.ascontiguousarray(ii, dtype=np.int64)
    cdef const int64_t[::1] J = np.ascontiguousarray(jj, dtype=np.int64)
    cdef Py_ssize_t k, W = P.shape[1]
    out = np.empty(I.shape[0], dtype=np.int64)
    cdef int64_t[::1] O = out
    with nogil:
        for k in range(I.shape[0]):
            O[k] = _ip(P, M, I[k], J[k], W)
    return out


def gray_min_weight(rows):
    cdef const uint64_t[:, ::1] R = np.ascontiguousarray(rows, dtype=np.uint64)
    cdef Py_ssize_t r = R.shape[0], W = R.shape[1], w
    if r == 0:
        raise ValueError("no nonzero combinations of an empty row set")
    if r > 62:
        raise ValueError("too many rows for a Gray-code sweep")
    cur_arr = np.zeros(W, dtype=np.uint64)
    cdef uint64_t[::1] cur = cur_arr
    cdef unsigned long long g, total = (<unsigned long long>1) << r
    cdef int idx
    cdef int64_t wt, best = -1
    with nogil:
        for g in range(1, total):
            idx = bchs_ctz(g)
            wt = 0
            for w in range(W):
                cur[w] ^= R[idx, w]
                wt += bchs_popcount(cur[w])
            if best < 0 or wt < best:
                best = wt
    return int(best)
