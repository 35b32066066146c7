"""numpy fallback for the packed-column kernels."""

import numpy as np

# columns per block in chunked Gram products
_BLOCK = 1024


def unpack_planes(plus, minus, m):
    """Dense ``(n, m)`` int8 trits from packed planes."""
    plus = np.ascontiguousarray(plus, dtype=np.uint64)
    minus = np.ascontiguousarray(minus, dtype=np.uint64)
    n = plus.shape[0]
    p = np.unpackbits(plus.view(np.uint8).reshape(n, -1), axis=1, bitorder="little")[:, :m]
    q = np.unpackbits(minus.view(np.uint8).reshape(n, -1), axis=1, bitorder="little")[:, :m]
    return p.astype(np.int8) - q.astype(np.int8)


def _dense(plus, minus):
    m = plus.shape[1] * 64
    return unpack_planes(plus, minus, m).astype(np.float64)


def trit_gram(plus, minus):
    """Exact integer Gram matrix of the packed columns."""
    d = _dense(plus, minus)
    # float64 sums of small integers are exact
    return np.rint(d @ d.T).astype(np.int64)


def trit_max_coherence(plus, minus, nnz):
    """Pair ``(i, j, ip)`` maximising ``ip^2 / (nnz_i nnz_j)`` over ``i < j``."""
    d = _dense(plus, minus)
    nnz = np.asarray(nnz, dtype=np.float64)
    n = d.shape[0]
    best = (-1.0, 0, 0, 0)
    for start in range(0, n, _BLOCK):
        stop = min(n, start + _BLOCK)
        g = np.rint(d[start:stop] @ d[start:].T)
        ratio = g * g / np.outer(nnz[start:stop], nnz[start:])
        # keep only j > i
        rows = np.arange(stop - start)[:, None]
        cols = np.arange(n - start)[None, :]
        ratio[cols <= rows] = -1.0
        flat = int(np.argmax(ratio))
        r, c = divmod(flat, ratio.shape[1])
        if ratio[r, c] > best[0]:
            best = (float(ratio[r, c]), start + r, start + c, int(g[r, c]))
    if best[0] < 0:
        return 0, 0, 0
    return best[1], best[2], best[3]


def trit_pair_products(plus, minus, ii, jj):
    ii = np.asarray(ii, dtype=np.int64)
    jj = np.asarray(jj, dtype=np.int64)
    out = np.empty(ii.shape[0], dtype=np.int64)
    pc = np.bitwise_count
    for start in range(0, ii.shape[0], 65536):
        a = slice(start, start + 65536)
        pi, mi = plus[ii[a]], minus[ii[a]]
        pj, mj = plus[jj[a]], minus[jj[a]]
        pos = pc(pi & pj).sum(axis=1, dtype=np.int64) + pc(mi & mj).sum(axis=1, dtype=np.int64)
        neg = pc(pi & mj).sum(axis=1, dtype=np.int64) + pc(mi & pj).sum(axis=1, dtype=np.int64)
        out[a] = pos - neg
    return out


def gray_min_weight(rows):
    """Minimum popcount over the nonzero XOR combinations of ``rows``."""
    rows = np.ascontiguousarray(rows, dtype=np.uint64)
    r = rows.shape[0]
    if r == 0:
        raise ValueError("no nonzero combinations of an empty row set")
    low = min(r, 14)
    table = np.zeros((1 << low, rows.shape[1]), dtype=np.uint64)
    for b in range(low):
        half = 1 << b
        np.bitwise_xor(table[:half], rows[b], out=table[half : 2 * half])
    best = None
    high = rows[low:]
    for hmask in range(1 << (r - low)):
        offset = np.zeros(rows.shape[1], dtype=np.uint64)
        for b in range(r - low):
            if (hmask >> b) & 1:
                offset ^= high[b]
        w = np.bitwise_count(table ^ offset).sum(axis=1, dtype=np.int64)
        if hmask == 0:
            w[0] = np.iinfo(np.int64).max
        cand = int(w.min())
        if best is None or cand < best:
            best = cand
    return best
